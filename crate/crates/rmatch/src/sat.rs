//! CNF formulas, brute-force (exact-)satisfiability oracles, shape
//! validation for the two reduction input classes, and the normalizer that
//! rewrites exact-satisfiability instances into clauses of three distinct
//! positive literals.
//!
//! The oracles are deliberately naive: they enumerate assignments in binary
//! counting order with `x1` as the most significant bit and return the first
//! model found, so results are reproducible and independent of any clever
//! search the rest of the crate performs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest variable count the brute-force oracles accept.
pub const ORACLE_VARIABLE_LIMIT: u32 = 24;

/// Errors for formula construction, evaluation, parsing and generation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("literal 0 is reserved as the clause terminator")]
    ZeroLiteral,
    #[error("literal {lit} names a variable outside 1..={num_vars}")]
    LiteralOutOfRange { lit: i32, num_vars: u32 },
    #[error("assignment covers {actual} variables, formula has {expected}")]
    AssignmentLengthMismatch { expected: u32, actual: u32 },
    #[error("formula has {vars} variables, above the oracle limit of {limit}")]
    TooManyVariables { vars: u32, limit: u32 },
    #[error("shape violations: {0}")]
    InvalidShape(ShapeReport),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

// ---------------------------------------------------------------------------
// Literals, formulas, assignments
// ---------------------------------------------------------------------------

/// A literal: a nonzero signed integer whose absolute value names a
/// 1-based variable and whose sign gives the polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn new(code: i32) -> Result<Lit, SatError> {
        if code == 0 {
            return Err(SatError::ZeroLiteral);
        }
        Ok(Lit(code))
    }

    /// The positive literal of variable `var` (1-based, nonzero).
    pub fn positive(var: u32) -> Lit {
        assert!(var > 0, "variables are 1-based");
        Lit(var as i32)
    }

    /// The negative literal of variable `var` (1-based, nonzero).
    pub fn negative(var: u32) -> Lit {
        assert!(var > 0, "variables are 1-based");
        Lit(-(var as i32))
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negated(self) -> Lit {
        Lit(-self.0)
    }

    /// The raw signed code, as written in DIMACS files.
    pub fn code(self) -> i32 {
        self.0
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "-x{}", self.var())
        }
    }
}

/// A CNF formula over variables `1..=num_vars`.  Clauses are kept in input
/// order; duplicate literals within a clause are preserved because exact
/// satisfiability counts true literals with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(
        num_vars: u32,
        clauses: impl IntoIterator<Item = Vec<Lit>>,
    ) -> Result<CnfFormula, SatError> {
        let clauses: Vec<Vec<Lit>> = clauses.into_iter().collect();
        for clause in &clauses {
            for &lit in clause {
                if lit.var() > num_vars {
                    return Err(SatError::LiteralOutOfRange {
                        lit: lit.code(),
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// Does `assignment` make at least one literal of every clause true?
    pub fn eval(&self, assignment: &Assignment) -> Result<bool, SatError> {
        self.check_len(assignment)?;
        Ok(self
            .clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment.truth(l))))
    }

    /// Does `assignment` make **exactly one** literal of every clause true,
    /// counting repeated literals with multiplicity?
    pub fn eval_exact(&self, assignment: &Assignment) -> Result<bool, SatError> {
        self.check_len(assignment)?;
        Ok(self
            .clauses
            .iter()
            .all(|c| c.iter().filter(|&&l| assignment.truth(l)).count() == 1))
    }

    fn check_len(&self, assignment: &Assignment) -> Result<(), SatError> {
        if assignment.len() != self.num_vars {
            return Err(SatError::AssignmentLengthMismatch {
                expected: self.num_vars,
                actual: assignment.len(),
            });
        }
        Ok(())
    }

    /// Serialize in DIMACS CNF format.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.code().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parse DIMACS CNF.  Comment lines start with `c`; the header declares
    /// the variable and clause counts and the latter must match the body.
    pub fn from_dimacs(text: &str) -> Result<CnfFormula, SatError> {
        let mut header: Option<(u32, usize)> = None;
        let mut codes: Vec<i32> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(SatError::Parse("duplicate header line".into()));
                }
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                    return Err(SatError::Parse(format!("malformed header: {line:?}")));
                }
                let n = fields[2]
                    .parse::<u32>()
                    .map_err(|_| SatError::Parse(format!("bad variable count: {:?}", fields[2])))?;
                let m = fields[3]
                    .parse::<usize>()
                    .map_err(|_| SatError::Parse(format!("bad clause count: {:?}", fields[3])))?;
                header = Some((n, m));
                continue;
            }
            if header.is_none() {
                return Err(SatError::Parse(format!(
                    "clause data before \"p cnf\" header: {line:?}"
                )));
            }
            for token in line.split_whitespace() {
                codes.push(
                    token
                        .parse::<i32>()
                        .map_err(|_| SatError::Parse(format!("bad literal token: {token:?}")))?,
                );
            }
        }
        let (num_vars, num_clauses) =
            header.ok_or_else(|| SatError::Parse("missing \"p cnf\" header".into()))?;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for code in codes {
            if code == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(Lit::new(code).expect("nonzero"));
            }
        }
        if !current.is_empty() {
            return Err(SatError::Parse(
                "final clause is not terminated by 0".into(),
            ));
        }
        if clauses.len() != num_clauses {
            return Err(SatError::Parse(format!(
                "header declares {num_clauses} clauses, body has {}",
                clauses.len()
            )));
        }
        CnfFormula::new(num_vars, clauses)
    }
}

/// A total truth assignment for variables `1..=len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    /// Decode `bits` into an assignment for `n` variables with `x1` as the
    /// most significant bit, so counting `bits` upward enumerates
    /// assignments in lexicographic order of `(x1, …, xn)`.
    pub fn from_bits(n: u32, bits: u64) -> Assignment {
        let values = (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect();
        Assignment { values }
    }

    pub fn len(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of the 1-based variable, or `None` when out of range.
    pub fn value(&self, var: u32) -> Option<bool> {
        self.values.get(var.checked_sub(1)? as usize).copied()
    }

    /// Truth of a literal under this assignment (panics if out of range).
    pub fn truth(&self, lit: Lit) -> bool {
        let v = self.values[(lit.var() - 1) as usize];
        v == lit.is_positive()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// One-line text form: `v` followed by a signed integer per variable
    /// (positive when true) and a terminating `0`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("v");
        for (i, &b) in self.values.iter().enumerate() {
            let var = i as i32 + 1;
            out.push(' ');
            out.push_str(&(if b { var } else { -var }).to_string());
        }
        out.push_str(" 0");
        out
    }

    /// Parse the `v … 0` form.  Every variable `1..=n` (with `n` the largest
    /// mentioned) must appear exactly once before the terminator.
    pub fn from_text(text: &str) -> Result<Assignment, SatError> {
        let mut tokens = text.split_whitespace();
        if tokens.next() != Some("v") {
            return Err(SatError::Parse("assignment must start with \"v\"".into()));
        }
        let mut seen: BTreeMap<u32, bool> = BTreeMap::new();
        let mut terminated = false;
        for token in tokens.by_ref() {
            let code = token
                .parse::<i32>()
                .map_err(|_| SatError::Parse(format!("bad assignment token: {token:?}")))?;
            if code == 0 {
                terminated = true;
                break;
            }
            let var = code.unsigned_abs();
            if seen.insert(var, code > 0).is_some() {
                return Err(SatError::Parse(format!("variable x{var} listed twice")));
            }
        }
        if !terminated {
            return Err(SatError::Parse("assignment is not terminated by 0".into()));
        }
        if tokens.next().is_some() {
            return Err(SatError::Parse("trailing tokens after terminator".into()));
        }
        let n = seen.keys().next_back().copied().unwrap_or(0);
        if seen.len() as u32 != n {
            let missing = (1..=n).find(|v| !seen.contains_key(v)).expect("gap exists");
            return Err(SatError::Parse(format!("variable x{missing} is missing")));
        }
        Ok(Assignment {
            values: seen.into_values().collect(),
        })
    }
}

// ---------------------------------------------------------------------------
// Brute-force oracles
// ---------------------------------------------------------------------------

/// First satisfying assignment in binary counting order (`x1` most
/// significant), or `None`.  Rejects formulas above
/// [`ORACLE_VARIABLE_LIMIT`] variables.
pub fn brute_force_sat(f: &CnfFormula) -> Result<Option<Assignment>, SatError> {
    oracle_scan(f, |f, a| {
        f.clauses().iter().all(|c| c.iter().any(|&l| a.truth(l)))
    })
}

/// First exactly-satisfying assignment (every clause has exactly one true
/// literal, counted with multiplicity) in binary counting order, or `None`.
pub fn brute_force_xsat(f: &CnfFormula) -> Result<Option<Assignment>, SatError> {
    oracle_scan(f, |f, a| {
        f.clauses()
            .iter()
            .all(|c| c.iter().filter(|&&l| a.truth(l)).count() == 1)
    })
}

fn oracle_scan(
    f: &CnfFormula,
    accepts: impl Fn(&CnfFormula, &Assignment) -> bool,
) -> Result<Option<Assignment>, SatError> {
    let n = f.num_vars();
    if n > ORACLE_VARIABLE_LIMIT {
        return Err(SatError::TooManyVariables {
            vars: n,
            limit: ORACLE_VARIABLE_LIMIT,
        });
    }
    for bits in 0..1u64 << n {
        let a = Assignment::from_bits(n, bits);
        if accepts(f, &a) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Shape validation
// ---------------------------------------------------------------------------

/// One way a formula fails a reduction's input contract.  Clause indices
/// are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeViolation {
    ClauseSizeNotTwoOrThree { clause: usize, size: usize },
    ClauseSizeNotThree { clause: usize, size: usize },
    ComplementaryPairInClause { clause: usize, var: u32 },
    NegativeLiteral { clause: usize, lit: Lit },
    DuplicateVariableInClause { clause: usize, var: u32 },
    TooManyPositiveOccurrences { var: u32, count: usize },
    TooManyNegativeOccurrences { var: u32, count: usize },
    TooManyOccurrences { var: u32, count: usize },
    OccurrenceCountNotThree { var: u32, count: usize },
}

impl fmt::Display for ShapeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ShapeViolation::*;
        match self {
            ClauseSizeNotTwoOrThree { clause, size } => {
                write!(f, "clause {clause} has {size} literals (2 or 3 required)")
            }
            ClauseSizeNotThree { clause, size } => {
                write!(
                    f,
                    "clause {clause} has {size} literals (exactly 3 required)"
                )
            }
            ComplementaryPairInClause { clause, var } => {
                write!(f, "clause {clause} contains both x{var} and -x{var}")
            }
            NegativeLiteral { clause, lit } => {
                write!(f, "clause {clause} contains negative literal {lit}")
            }
            DuplicateVariableInClause { clause, var } => {
                write!(f, "clause {clause} mentions x{var} more than once")
            }
            TooManyPositiveOccurrences { var, count } => {
                write!(f, "x{var} occurs positively {count} times (limit 2)")
            }
            TooManyNegativeOccurrences { var, count } => {
                write!(f, "x{var} occurs negatively {count} times (limit 1)")
            }
            TooManyOccurrences { var, count } => {
                write!(f, "x{var} occurs {count} times (limit 3)")
            }
            OccurrenceCountNotThree { var, count } => {
                write!(f, "x{var} occurs {count} times (exactly 3 required)")
            }
        }
    }
}

/// Outcome of a shape check: empty means the formula fits the contract.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShapeReport {
    pub violations: Vec<ShapeViolation>,
}

impl ShapeReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ShapeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "none");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Input contract of the max-degree-4 reduction: every clause has two or
/// three literals and contains no complementary pair, every variable has at
/// most two positive and at most one negative occurrence (counted with
/// multiplicity, which keeps the degree bound of the construction intact
/// even for repeated literals).
pub fn validate_t1_shape(f: &CnfFormula) -> ShapeReport {
    let mut violations = Vec::new();
    let mut pos = vec![0usize; f.num_vars() as usize + 1];
    let mut neg = vec![0usize; f.num_vars() as usize + 1];
    for (j, clause) in f.clauses().iter().enumerate() {
        if clause.len() != 2 && clause.len() != 3 {
            violations.push(ShapeViolation::ClauseSizeNotTwoOrThree {
                clause: j + 1,
                size: clause.len(),
            });
        }
        let mut seen: BTreeMap<u32, (bool, bool)> = BTreeMap::new();
        for &lit in clause {
            let entry = seen.entry(lit.var()).or_insert((false, false));
            if lit.is_positive() {
                entry.0 = true;
                pos[lit.var() as usize] += 1;
            } else {
                entry.1 = true;
                neg[lit.var() as usize] += 1;
            }
        }
        for (var, (has_pos, has_neg)) in seen {
            if has_pos && has_neg {
                violations.push(ShapeViolation::ComplementaryPairInClause { clause: j + 1, var });
            }
        }
    }
    for var in 1..=f.num_vars() {
        if pos[var as usize] > 2 {
            violations.push(ShapeViolation::TooManyPositiveOccurrences {
                var,
                count: pos[var as usize],
            });
        }
        if neg[var as usize] > 1 {
            violations.push(ShapeViolation::TooManyNegativeOccurrences {
                var,
                count: neg[var as usize],
            });
        }
    }
    ShapeReport { violations }
}

/// Input contract of the bipartite reduction: clauses of exactly three
/// distinct positive literals, every variable at most three occurrences.
pub fn validate_t2_shape(f: &CnfFormula) -> ShapeReport {
    let mut violations = Vec::new();
    let mut occ = vec![0usize; f.num_vars() as usize + 1];
    for (j, clause) in f.clauses().iter().enumerate() {
        if clause.len() != 3 {
            violations.push(ShapeViolation::ClauseSizeNotThree {
                clause: j + 1,
                size: clause.len(),
            });
        }
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut flagged: BTreeSet<u32> = BTreeSet::new();
        for &lit in clause {
            if !lit.is_positive() {
                violations.push(ShapeViolation::NegativeLiteral { clause: j + 1, lit });
            }
            if !seen.insert(lit.var()) && flagged.insert(lit.var()) {
                violations.push(ShapeViolation::DuplicateVariableInClause {
                    clause: j + 1,
                    var: lit.var(),
                });
            }
            occ[lit.var() as usize] += 1;
        }
    }
    for var in 1..=f.num_vars() {
        if occ[var as usize] > 3 {
            violations.push(ShapeViolation::TooManyOccurrences {
                var,
                count: occ[var as usize],
            });
        }
    }
    ShapeReport { violations }
}

// ---------------------------------------------------------------------------
// Exact-satisfiability normalization
// ---------------------------------------------------------------------------

/// How picky [`normalize_xsat`] is about per-variable occurrence counts.
/// Clause sizes must be exactly three either way (duplicates allowed —
/// removing them is the normalizer's job).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizeStrictness {
    /// Every variable must occur exactly three times across the formula
    /// (the source form).
    #[default]
    ExactlyThreeOccurrences,
    /// Accept variables with fewer than three occurrences too.
    AtMostThreeOccurrences,
}

/// Four fresh variables padding a two-literal clause `x ∨ y` into clauses of
/// three distinct variables: `(x, y, a1) (a1, a2, a3) (a1, a2, a4)
/// (a2, a3, a4)`.  The last three force `a2` true and `a1, a3, a4` false, so
/// the first is exactly satisfied iff exactly one of `x, y` is true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetBlock {
    /// 1-based index of the input clause that shrank to two literals.
    pub source_clause: usize,
    /// The surviving pair, in output numbering.
    pub x: u32,
    pub y: u32,
    /// The fresh variables `a1..a4`, in output numbering.
    pub aux: [u32; 4],
}

/// How each input variable maps into the normalized formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeProvenance {
    pub original_num_vars: u32,
    /// Variables whose value is implied by every exact model.
    pub forced: BTreeMap<u32, bool>,
    /// Surviving input variables → their dense output index.
    pub renamed: BTreeMap<u32, u32>,
    /// One entry per padded two-literal clause, in output clause order.
    pub gadgets: Vec<GadgetBlock>,
}

impl NormalizeProvenance {
    pub fn normalized_num_vars(&self) -> u32 {
        self.renamed.len() as u32 + 4 * self.gadgets.len() as u32
    }

    /// Map a model of the normalized formula back onto the input variables.
    /// Forced variables take their implied value; variables that occur
    /// nowhere default to false.
    pub fn restore_assignment(&self, normalized: &Assignment) -> Result<Assignment, SatError> {
        if normalized.len() != self.normalized_num_vars() {
            return Err(SatError::AssignmentLengthMismatch {
                expected: self.normalized_num_vars(),
                actual: normalized.len(),
            });
        }
        let values = (1..=self.original_num_vars)
            .map(|v| {
                if let Some(&b) = self.forced.get(&v) {
                    b
                } else if let Some(&nv) = self.renamed.get(&v) {
                    normalized.value(nv).expect("renamed index in range")
                } else {
                    false
                }
            })
            .collect();
        Ok(Assignment::new(values))
    }

    /// Extend a model of the input onto the normalized variables.  Gadget
    /// variables take their unique exact values (`a2` true, the rest
    /// false).  The result exactly satisfies the normalized formula
    /// whenever `original` exactly satisfies the input.
    pub fn lift_assignment(&self, original: &Assignment) -> Result<Assignment, SatError> {
        if original.len() != self.original_num_vars {
            return Err(SatError::AssignmentLengthMismatch {
                expected: self.original_num_vars,
                actual: original.len(),
            });
        }
        let mut values = vec![false; self.normalized_num_vars() as usize];
        for (&orig, &new) in &self.renamed {
            values[(new - 1) as usize] = original.value(orig).expect("in range");
        }
        for block in &self.gadgets {
            values[(block.aux[1] - 1) as usize] = true;
        }
        Ok(Assignment::new(values))
    }
}

/// Result of normalization: either an equivalent formula whose clauses all
/// have three distinct positive literals, or a proof sketch that the input
/// has no exact model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizeOutcome {
    Normalized {
        formula: CnfFormula,
        provenance: NormalizeProvenance,
    },
    Unsatisfiable {
        reason: String,
    },
}

/// Rewrite a positive formula (clause size exactly three, duplicates within
/// clauses allowed, occurrence counts per `strictness`) into an
/// exact-satisfiability-equivalent one where every clause has exactly three
/// distinct variables.
///
/// A variable repeated in a clause can never be true in an exact model, so
/// it is forced false; forced values are propagated to a fixpoint
/// (single-survivor clauses force that survivor true, true variables force
/// their clause-mates false and retire the clause).  Surviving two-literal
/// clauses are padded with a fresh four-variable block.  Contradictions
/// surface as [`NormalizeOutcome::Unsatisfiable`].
pub fn normalize_xsat(
    f: &CnfFormula,
    strictness: NormalizeStrictness,
) -> Result<NormalizeOutcome, SatError> {
    // Input contract first: positive, size exactly three, occurrence-bounded.
    let mut violations = Vec::new();
    let mut occ = vec![0usize; f.num_vars() as usize + 1];
    for (j, clause) in f.clauses().iter().enumerate() {
        if clause.len() != 3 {
            violations.push(ShapeViolation::ClauseSizeNotThree {
                clause: j + 1,
                size: clause.len(),
            });
        }
        for &lit in clause {
            if !lit.is_positive() {
                violations.push(ShapeViolation::NegativeLiteral { clause: j + 1, lit });
            }
            occ[lit.var() as usize] += 1;
        }
    }
    for var in 1..=f.num_vars() {
        let count = occ[var as usize];
        match strictness {
            NormalizeStrictness::ExactlyThreeOccurrences => {
                if count != 3 {
                    violations.push(ShapeViolation::OccurrenceCountNotThree { var, count });
                }
            }
            NormalizeStrictness::AtMostThreeOccurrences => {
                if count > 3 {
                    violations.push(ShapeViolation::TooManyOccurrences { var, count });
                }
            }
        }
    }
    if !violations.is_empty() {
        return Err(SatError::InvalidShape(ShapeReport { violations }));
    }

    match propagate(f) {
        Err(reason) => Ok(NormalizeOutcome::Unsatisfiable { reason }),
        Ok(state) => Ok(assemble(f, state)),
    }
}

struct PropagationState {
    /// Per input clause: `None` once retired, otherwise the remaining
    /// variables in clause order.
    clauses: Vec<Option<Vec<u32>>>,
    value: BTreeMap<u32, bool>,
}

/// Run forced-value propagation to a fixpoint.  `Err` carries a
/// human-readable contradiction.
fn propagate(f: &CnfFormula) -> Result<PropagationState, String> {
    let mut clauses: Vec<Option<Vec<u32>>> = f
        .clauses()
        .iter()
        .map(|c| Some(c.iter().map(|l| l.var()).collect()))
        .collect();
    let mut value: BTreeMap<u32, bool> = BTreeMap::new();
    let mut queue: VecDeque<u32> = VecDeque::new();
    let mut var_clauses: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (j, clause) in f.clauses().iter().enumerate() {
        for &lit in clause {
            let entry = var_clauses.entry(lit.var()).or_default();
            if entry.last() != Some(&j) {
                entry.push(j);
            }
        }
    }

    let assign = |var: u32,
                  b: bool,
                  value: &mut BTreeMap<u32, bool>,
                  queue: &mut VecDeque<u32>|
     -> Result<(), String> {
        match value.get(&var) {
            Some(&cur) if cur != b => Err(format!("variable x{var} is forced both true and false")),
            Some(_) => Ok(()),
            None => {
                value.insert(var, b);
                queue.push_back(var);
                Ok(())
            }
        }
    };

    // Seeds: a variable repeated within a clause must be false; a
    // single-literal clause's variable must be true.
    for clause in f.clauses() {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &lit in clause {
            *counts.entry(lit.var()).or_default() += 1;
        }
        for (&var, &count) in &counts {
            if count >= 2 {
                assign(var, false, &mut value, &mut queue)?;
            }
        }
        if clause.len() == 1 {
            assign(clause[0].var(), true, &mut value, &mut queue)?;
        }
    }

    while let Some(var) = queue.pop_front() {
        let b = value[&var];
        for &j in var_clauses.get(&var).into_iter().flatten() {
            let Some(members) = clauses[j].as_mut() else {
                continue;
            };
            if !members.contains(&var) {
                continue;
            }
            if b {
                if members.iter().filter(|&&w| w == var).count() >= 2 {
                    return Err(format!(
                        "clause {} would have two true copies of x{var}",
                        j + 1
                    ));
                }
                let others: Vec<u32> = members.iter().copied().filter(|&w| w != var).collect();
                clauses[j] = None;
                for w in others {
                    assign(w, false, &mut value, &mut queue)?;
                }
            } else {
                members.retain(|&w| w != var);
                match members.len() {
                    0 => {
                        return Err(format!(
                            "clause {} has no remaining literal that could be true",
                            j + 1
                        ))
                    }
                    1 => {
                        let survivor = members[0];
                        match value.get(&survivor) {
                            Some(true) => clauses[j] = None,
                            Some(false) => {
                                return Err(format!(
                                    "clause {} has no remaining literal that could be true",
                                    j + 1
                                ))
                            }
                            None => assign(survivor, true, &mut value, &mut queue)?,
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(PropagationState { clauses, value })
}

/// Renumber survivors densely, pad two-literal clauses with gadget blocks.
fn assemble(f: &CnfFormula, state: PropagationState) -> NormalizeOutcome {
    let mut surviving_vars: BTreeSet<u32> = BTreeSet::new();
    for members in state.clauses.iter().flatten() {
        surviving_vars.extend(members.iter().copied());
    }
    let renamed: BTreeMap<u32, u32> = surviving_vars
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32 + 1))
        .collect();

    let mut next_var = renamed.len() as u32;
    let mut out_clauses: Vec<Vec<Lit>> = Vec::new();
    let mut gadgets: Vec<GadgetBlock> = Vec::new();
    for (j, members) in state.clauses.iter().enumerate() {
        let Some(members) = members else { continue };
        let new: Vec<u32> = members.iter().map(|v| renamed[v]).collect();
        match new.len() {
            3 => out_clauses.push(new.iter().map(|&v| Lit::positive(v)).collect()),
            2 => {
                let aux = [next_var + 1, next_var + 2, next_var + 3, next_var + 4];
                next_var += 4;
                let [a1, a2, a3, a4] = aux;
                out_clauses.push(vec![
                    Lit::positive(new[0]),
                    Lit::positive(new[1]),
                    Lit::positive(a1),
                ]);
                out_clauses.push(vec![
                    Lit::positive(a1),
                    Lit::positive(a2),
                    Lit::positive(a3),
                ]);
                out_clauses.push(vec![
                    Lit::positive(a1),
                    Lit::positive(a2),
                    Lit::positive(a4),
                ]);
                out_clauses.push(vec![
                    Lit::positive(a2),
                    Lit::positive(a3),
                    Lit::positive(a4),
                ]);
                gadgets.push(GadgetBlock {
                    source_clause: j + 1,
                    x: new[0],
                    y: new[1],
                    aux,
                });
            }
            other => unreachable!("surviving clause of size {other}"),
        }
    }

    let formula = CnfFormula::new(next_var, out_clauses).expect("construction is in range");
    debug_assert!(validate_t2_shape(&formula).is_valid());
    NormalizeOutcome::Normalized {
        formula,
        provenance: NormalizeProvenance {
            original_num_vars: f.num_vars(),
            forced: state.value,
            renamed,
            gadgets,
        },
    }
}

// ---------------------------------------------------------------------------
// Seeded random instances
// ---------------------------------------------------------------------------

/// A random formula meeting the max-degree-4 reduction's input contract:
/// `num_clauses` clauses of two or three distinct variables over `num_vars`
/// variables, at most two positive and one negative occurrence per variable.
/// Requires `num_vars >= 2` (a two-literal clause needs two distinct
/// variables) and `2 * num_clauses <= 3 * num_vars` (the total occurrence
/// budget).  Deterministic in `seed`.
pub fn random_t1_instance(
    num_vars: u32,
    num_clauses: u32,
    seed: u64,
) -> Result<CnfFormula, SatError> {
    if num_clauses == 0 {
        return CnfFormula::new(num_vars, Vec::new());
    }
    if num_vars < 2 {
        return Err(SatError::InvalidArgument(
            "clauses of two distinct variables need at least two variables".into(),
        ));
    }
    if 2 * u64::from(num_clauses) > 3 * u64::from(num_vars) {
        return Err(SatError::InvalidArgument(format!(
            "{num_clauses} two-literal clauses exceed the occurrence budget of {num_vars} variables"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = num_vars as usize;
    let m = num_clauses as usize;
    'attempt: for _ in 0..64 {
        let mut pos_cap = vec![2u32; n + 1];
        let mut neg_cap = vec![1u32; n + 1];
        let mut slots_left = 3 * n;
        let mut clauses = Vec::with_capacity(m);
        for j in 0..m {
            let reserved = 2 * (m - j - 1);
            let want_three = slots_left >= reserved + 3 && rng.gen_bool(0.6);
            let target = if want_three { 3 } else { 2 };
            let mut clause: Vec<Lit> = Vec::new();
            let mut used: BTreeSet<u32> = BTreeSet::new();
            for _ in 0..target {
                let eligible: Vec<u32> = (1..=num_vars)
                    .filter(|&v| {
                        !used.contains(&v) && pos_cap[v as usize] + neg_cap[v as usize] > 0
                    })
                    .collect();
                if eligible.is_empty() {
                    break;
                }
                let v = eligible[rng.gen_range(0..eligible.len())];
                let p = pos_cap[v as usize];
                let q = neg_cap[v as usize];
                let positive = rng.gen_range(0..p + q) < p;
                if positive {
                    pos_cap[v as usize] -= 1;
                    clause.push(Lit::positive(v));
                } else {
                    neg_cap[v as usize] -= 1;
                    clause.push(Lit::negative(v));
                }
                used.insert(v);
                slots_left -= 1;
            }
            if clause.len() < 2 {
                continue 'attempt;
            }
            clauses.push(clause);
        }
        let f = CnfFormula::new(num_vars, clauses).expect("in range");
        debug_assert!(validate_t1_shape(&f).is_valid());
        return Ok(f);
    }
    // Fallback that cannot dead-end: two-literal clauses round-robin over a
    // shuffled variable order.  Position `2j, 2j + 1` of the cycle land on
    // distinct variables (num_vars >= 2), each variable is used at most
    // ceil(2m / n) <= 3 times, and its first two uses are positive.
    let mut order: Vec<u32> = (1..=num_vars).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut uses = vec![0u32; n + 1];
    let mut take = |slot: usize| -> Lit {
        let v = order[slot % n];
        uses[v as usize] += 1;
        if uses[v as usize] <= 2 {
            Lit::positive(v)
        } else {
            Lit::negative(v)
        }
    };
    let clauses: Vec<Vec<Lit>> = (0..m).map(|j| vec![take(2 * j), take(2 * j + 1)]).collect();
    let f = CnfFormula::new(num_vars, clauses).expect("in range");
    debug_assert!(validate_t1_shape(&f).is_valid());
    Ok(f)
}

/// A random formula meeting the bipartite reduction's input contract:
/// `num_clauses` clauses of exactly three distinct positive literals over
/// `num_vars` variables, at most three occurrences per variable (this
/// requires `num_clauses <= num_vars`).  Deterministic in `seed`.
pub fn random_x3sat_instance(
    num_vars: u32,
    num_clauses: u32,
    seed: u64,
) -> Result<CnfFormula, SatError> {
    if num_clauses == 0 {
        return CnfFormula::new(num_vars, Vec::new());
    }
    if num_vars < 3 {
        return Err(SatError::InvalidArgument(
            "clauses of three distinct variables need at least three variables".into(),
        ));
    }
    if num_clauses > num_vars {
        return Err(SatError::InvalidArgument(format!(
            "{num_clauses} clauses of three literals exceed the occurrence budget of {num_vars} variables"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = num_vars as usize;
    'attempt: for _ in 0..64 {
        let mut cap = vec![3u32; n + 1];
        let mut clauses = Vec::with_capacity(num_clauses as usize);
        for _ in 0..num_clauses {
            let mut clause: Vec<Lit> = Vec::new();
            let mut used: BTreeSet<u32> = BTreeSet::new();
            for _ in 0..3 {
                let eligible: Vec<u32> = (1..=num_vars)
                    .filter(|&v| !used.contains(&v) && cap[v as usize] > 0)
                    .collect();
                if eligible.is_empty() {
                    continue 'attempt;
                }
                let v = eligible[rng.gen_range(0..eligible.len())];
                cap[v as usize] -= 1;
                used.insert(v);
                clause.push(Lit::positive(v));
            }
            clauses.push(clause);
        }
        let f = CnfFormula::new(num_vars, clauses).expect("in range");
        debug_assert!(validate_t2_shape(&f).is_valid());
        return Ok(f);
    }
    // Random assembly kept painting itself into a corner; fall back to a
    // shuffled round-robin that provably respects every budget.
    let mut order: Vec<u32> = (1..=num_vars).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let clauses: Vec<Vec<Lit>> = (0..num_clauses as usize)
        .map(|j| {
            (0..3)
                .map(|k| Lit::positive(order[(3 * j + k) % n]))
                .collect()
        })
        .collect();
    let f = CnfFormula::new(num_vars, clauses).expect("in range");
    debug_assert!(validate_t2_shape(&f).is_valid());
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clause(codes: &[i32]) -> Vec<Lit> {
        codes.iter().map(|&c| Lit::new(c).unwrap()).collect()
    }

    fn formula(n: u32, clauses: &[&[i32]]) -> CnfFormula {
        CnfFormula::new(n, clauses.iter().map(|c| clause(c))).unwrap()
    }

    // ---- literals & construction ------------------------------------------

    #[test]
    fn literal_basics() {
        assert_eq!(Lit::new(0), Err(SatError::ZeroLiteral));
        let l = Lit::new(-3).unwrap();
        assert_eq!(l.var(), 3);
        assert!(!l.is_positive());
        assert_eq!(l.negated(), Lit::positive(3));
        assert_eq!(l.to_string(), "-x3");
        assert_eq!(Lit::positive(3).to_string(), "x3");
    }

    #[test]
    fn formula_rejects_out_of_range_literals() {
        assert_eq!(
            CnfFormula::new(2, vec![clause(&[1, -3])]),
            Err(SatError::LiteralOutOfRange {
                lit: -3,
                num_vars: 2
            })
        );
    }

    // ---- evaluation -----------------------------------------------------------

    #[test]
    fn eval_distinguishes_plain_and_exact() {
        let f = formula(2, &[&[1, 2]]);
        let both = Assignment::new(vec![true, true]);
        let one = Assignment::new(vec![false, true]);
        let none = Assignment::new(vec![false, false]);
        assert_eq!(f.eval(&both), Ok(true));
        assert_eq!(f.eval_exact(&both), Ok(false));
        assert_eq!(f.eval(&one), Ok(true));
        assert_eq!(f.eval_exact(&one), Ok(true));
        assert_eq!(f.eval(&none), Ok(false));
        assert_eq!(f.eval_exact(&none), Ok(false));
    }

    #[test]
    fn eval_exact_counts_duplicates_with_multiplicity() {
        let f = formula(2, &[&[1, 1, 2]]);
        // x1 true makes two literals true at once.
        assert_eq!(f.eval_exact(&Assignment::new(vec![true, false])), Ok(false));
        assert_eq!(f.eval_exact(&Assignment::new(vec![false, true])), Ok(true));
    }

    #[test]
    fn eval_rejects_wrong_assignment_length() {
        let f = formula(3, &[&[1]]);
        assert_eq!(
            f.eval(&Assignment::new(vec![true])),
            Err(SatError::AssignmentLengthMismatch {
                expected: 3,
                actual: 1
            })
        );
    }

    // ---- oracles -------------------------------------------------------------

    #[test]
    fn assignment_bits_put_x1_in_the_most_significant_position() {
        let a = Assignment::from_bits(3, 0b100);
        assert_eq!(a.values(), &[true, false, false]);
    }

    #[test]
    fn sat_oracle_returns_first_model_in_counting_order() {
        let f = formula(2, &[&[1, 2]]);
        let a = brute_force_sat(&f).unwrap().unwrap();
        // 00 fails, 01 (x1 false, x2 true) is the first model.
        assert_eq!(a.values(), &[false, true]);
    }

    #[test]
    fn sat_oracle_detects_unsatisfiable() {
        let f = formula(1, &[&[1], &[-1]]);
        assert_eq!(brute_force_sat(&f).unwrap(), None);
    }

    #[test]
    fn xsat_oracle_returns_first_exact_model() {
        let f = formula(3, &[&[1, 2, 3]]);
        let a = brute_force_xsat(&f).unwrap().unwrap();
        assert_eq!(a.values(), &[false, false, true]);
    }

    #[test]
    fn smallest_positive_three_cnf_without_exact_model() {
        // Every pair of variables shares a clause, so at most one variable
        // can be true; but then some clause holds none of the true ones.
        let f = formula(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]]);
        assert!(validate_t2_shape(&f).is_valid());
        assert_eq!(brute_force_xsat(&f).unwrap(), None);
        // It is satisfiable in the ordinary sense.
        assert!(brute_force_sat(&f).unwrap().is_some());
    }

    #[test]
    fn oracle_enforces_variable_limit() {
        let f = CnfFormula::new(25, Vec::new()).unwrap();
        assert_eq!(
            brute_force_sat(&f),
            Err(SatError::TooManyVariables {
                vars: 25,
                limit: 24
            })
        );
    }

    // ---- DIMACS & assignment text ------------------------------------------

    #[test]
    fn dimacs_round_trip_and_reference_text() {
        let f = formula(3, &[&[1, -2, 3], &[2, 3]]);
        let text = f.to_dimacs();
        assert_eq!(text, "p cnf 3 2\n1 -2 3 0\n2 3 0\n");
        assert_eq!(CnfFormula::from_dimacs(&text).unwrap(), f);
    }

    #[test]
    fn dimacs_accepts_comments_and_multiline_clauses() {
        let text = "c a comment\np cnf 3 2\nc another\n1 -2\n3 0\n2 3 0\n";
        let f = CnfFormula::from_dimacs(text).unwrap();
        assert_eq!(f.num_vars(), 3);
        assert_eq!(f.clauses()[0], clause(&[1, -2, 3]));
    }

    #[test]
    fn dimacs_rejects_malformed_input() {
        assert!(matches!(
            CnfFormula::from_dimacs("p cnf 2 2\n1 0\n"),
            Err(SatError::Parse(_))
        ));
        assert!(matches!(
            CnfFormula::from_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(SatError::LiteralOutOfRange { .. })
        ));
        assert!(matches!(
            CnfFormula::from_dimacs("p cnf 2 1\n1 2\n"),
            Err(SatError::Parse(_))
        ));
        assert!(matches!(
            CnfFormula::from_dimacs("1 2 0\n"),
            Err(SatError::Parse(_))
        ));
    }

    #[test]
    fn assignment_text_round_trip() {
        let a = Assignment::new(vec![true, false, true]);
        assert_eq!(a.to_text(), "v 1 -2 3 0");
        assert_eq!(Assignment::from_text("v 1 -2 3 0").unwrap(), a);
        assert_eq!(Assignment::from_text("v -2 3 1 0").unwrap(), a);
    }

    #[test]
    fn assignment_text_rejects_gaps_duplicates_and_missing_terminator() {
        assert!(matches!(
            Assignment::from_text("v 1 3 0"),
            Err(SatError::Parse(_))
        ));
        assert!(matches!(
            Assignment::from_text("v 1 -1 0"),
            Err(SatError::Parse(_))
        ));
        assert!(matches!(
            Assignment::from_text("v 1 2"),
            Err(SatError::Parse(_))
        ));
        assert!(matches!(
            Assignment::from_text("1 2 0"),
            Err(SatError::Parse(_))
        ));
    }

    // ---- shape validation ------------------------------------------------------

    #[test]
    fn t1_shape_accepts_reference_instance() {
        let f = formula(2, &[&[1, 2], &[-1, 2]]);
        assert!(validate_t1_shape(&f).is_valid());
    }

    #[test]
    fn t1_shape_flags_each_violation() {
        let f = formula(3, &[&[1, -1], &[1, 1, 2, 3], &[2], &[-1, 2]]);
        let report = validate_t1_shape(&f);
        assert_eq!(
            report.violations,
            vec![
                ShapeViolation::ComplementaryPairInClause { clause: 1, var: 1 },
                ShapeViolation::ClauseSizeNotTwoOrThree { clause: 2, size: 4 },
                ShapeViolation::ClauseSizeNotTwoOrThree { clause: 3, size: 1 },
                ShapeViolation::TooManyPositiveOccurrences { var: 1, count: 3 },
                ShapeViolation::TooManyNegativeOccurrences { var: 1, count: 2 },
                ShapeViolation::TooManyPositiveOccurrences { var: 2, count: 3 },
            ]
        );
    }

    #[test]
    fn t1_shape_rejects_a_third_positive_occurrence() {
        let f = formula(4, &[&[1, 2], &[1, 3], &[1, 4]]);
        let report = validate_t1_shape(&f);
        assert_eq!(
            report.violations,
            vec![ShapeViolation::TooManyPositiveOccurrences { var: 1, count: 3 }]
        );
    }

    #[test]
    fn t2_shape_accepts_reference_instance() {
        let f = formula(4, &[&[1, 2, 3], &[2, 3, 4]]);
        assert!(validate_t2_shape(&f).is_valid());
    }

    #[test]
    fn t2_shape_flags_each_violation() {
        let f = formula(3, &[&[1, 2], &[1, -2, 3], &[1, 1, 3], &[1, 2, 3]]);
        let report = validate_t2_shape(&f);
        assert_eq!(
            report.violations,
            vec![
                ShapeViolation::ClauseSizeNotThree { clause: 1, size: 2 },
                ShapeViolation::NegativeLiteral {
                    clause: 2,
                    lit: Lit::negative(2)
                },
                ShapeViolation::DuplicateVariableInClause { clause: 3, var: 1 },
                ShapeViolation::TooManyOccurrences { var: 1, count: 5 },
            ]
        );
    }

    // ---- normalization --------------------------------------------------------

    fn normalized(f: &CnfFormula) -> (CnfFormula, NormalizeProvenance) {
        match normalize_xsat(f, NormalizeStrictness::AtMostThreeOccurrences).unwrap() {
            NormalizeOutcome::Normalized {
                formula,
                provenance,
            } => (formula, provenance),
            NormalizeOutcome::Unsatisfiable { reason } => {
                panic!("unexpected unsatisfiable verdict: {reason}")
            }
        }
    }

    #[test]
    fn normalize_passes_clean_instances_through() {
        let f = formula(4, &[&[1, 2, 3], &[2, 3, 4]]);
        let (out, prov) = normalized(&f);
        assert_eq!(out, f);
        assert!(prov.forced.is_empty());
        assert!(prov.gadgets.is_empty());
        assert_eq!(prov.renamed.len(), 4);
    }

    #[test]
    fn normalize_accepts_the_source_form_and_keeps_it_intact() {
        // Every variable occurs exactly three times, so the strict mode
        // accepts, and without duplicates nothing is forced.
        let f = formula(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]]);
        match normalize_xsat(&f, NormalizeStrictness::ExactlyThreeOccurrences).unwrap() {
            NormalizeOutcome::Normalized {
                formula,
                provenance,
            } => {
                assert_eq!(formula, f);
                assert!(provenance.forced.is_empty());
                assert!(provenance.gadgets.is_empty());
            }
            other => panic!("expected identity normalization, got {other:?}"),
        }
    }

    #[test]
    fn normalize_forces_duplicated_variables_false() {
        // (x1 x1 x2): x1 twice would be two true literals, so x1 = 0 and
        // then x2 = 1; nothing survives.
        let f = formula(2, &[&[1, 1, 2]]);
        let (out, prov) = normalized(&f);
        assert_eq!(out.num_vars(), 0);
        assert_eq!(out.num_clauses(), 0);
        assert_eq!(prov.forced.get(&1), Some(&false));
        assert_eq!(prov.forced.get(&2), Some(&true));
        let restored = prov
            .restore_assignment(&Assignment::new(Vec::new()))
            .unwrap();
        assert_eq!(f.eval_exact(&restored), Ok(true));
    }

    #[test]
    fn normalize_detects_tripled_variable_contradiction() {
        let f = formula(1, &[&[1, 1, 1]]);
        match normalize_xsat(&f, NormalizeStrictness::ExactlyThreeOccurrences).unwrap() {
            NormalizeOutcome::Unsatisfiable { reason } => {
                assert!(reason.contains("clause 1"), "reason: {reason}");
            }
            other => panic!("expected unsatisfiable, got {other:?}"),
        }
    }

    #[test]
    fn normalize_detects_conflicting_forcings() {
        // x2 = 1 (survivor of clause 1) and x4 = 1 (survivor of clause 2)
        // would be two true literals in clause 3.
        let f = formula(5, &[&[1, 1, 2], &[3, 3, 4], &[2, 4, 5]]);
        match normalize_xsat(&f, NormalizeStrictness::AtMostThreeOccurrences).unwrap() {
            NormalizeOutcome::Unsatisfiable { .. } => {}
            other => panic!("expected unsatisfiable, got {other:?}"),
        }
        assert_eq!(brute_force_xsat(&f).unwrap(), None);
    }

    #[test]
    fn normalize_pads_surviving_pairs_with_gadget_blocks() {
        // Clause 3 forces x4 = 0 (duplicate) and x6 = 1, clause 2 loses x4
        // and survives as the pair (x3, x5).
        let f = formula(6, &[&[1, 2, 3], &[3, 4, 5], &[4, 4, 6]]);
        let (out, prov) = normalized(&f);
        assert_eq!(prov.forced.get(&4), Some(&false));
        assert_eq!(prov.forced.get(&6), Some(&true));
        assert_eq!(
            prov.renamed,
            BTreeMap::from([(1, 1), (2, 2), (3, 3), (5, 4)])
        );
        assert_eq!(prov.gadgets.len(), 1);
        let block = &prov.gadgets[0];
        assert_eq!(block.source_clause, 2);
        assert_eq!((block.x, block.y), (3, 4));
        assert_eq!(block.aux, [5, 6, 7, 8]);
        assert_eq!(out.num_vars(), 8);
        assert_eq!(out.num_clauses(), 5);
        assert!(validate_t2_shape(&out).is_valid());
        // Equivalence in both directions via the oracles.
        let fwd = brute_force_xsat(&f).unwrap().unwrap();
        let lifted = prov.lift_assignment(&fwd).unwrap();
        assert_eq!(out.eval_exact(&lifted), Ok(true));
        let back = brute_force_xsat(&out).unwrap().unwrap();
        let restored = prov.restore_assignment(&back).unwrap();
        assert_eq!(f.eval_exact(&restored), Ok(true));
    }

    #[test]
    fn normalize_strictness_controls_occurrence_counts() {
        // One occurrence per variable: fine when relaxed, rejected when the
        // source form (exactly three occurrences) is required.
        let f = formula(3, &[&[1, 2, 3]]);
        match normalize_xsat(&f, NormalizeStrictness::ExactlyThreeOccurrences) {
            Err(SatError::InvalidShape(report)) => {
                assert_eq!(
                    report.violations,
                    vec![
                        ShapeViolation::OccurrenceCountNotThree { var: 1, count: 1 },
                        ShapeViolation::OccurrenceCountNotThree { var: 2, count: 1 },
                        ShapeViolation::OccurrenceCountNotThree { var: 3, count: 1 },
                    ]
                );
            }
            other => panic!("expected shape rejection, got {other:?}"),
        }
        match normalize_xsat(&f, NormalizeStrictness::AtMostThreeOccurrences).unwrap() {
            NormalizeOutcome::Normalized { formula, .. } => assert_eq!(formula, f),
            other => panic!("expected normalized output, got {other:?}"),
        }
    }

    #[test]
    fn normalize_rejects_short_clauses_in_both_modes() {
        let f = formula(3, &[&[1, 2]]);
        for strictness in [
            NormalizeStrictness::ExactlyThreeOccurrences,
            NormalizeStrictness::AtMostThreeOccurrences,
        ] {
            match normalize_xsat(&f, strictness) {
                Err(SatError::InvalidShape(report)) => {
                    assert!(report
                        .violations
                        .contains(&ShapeViolation::ClauseSizeNotThree { clause: 1, size: 2 }));
                }
                other => panic!("expected shape rejection, got {other:?}"),
            }
        }
    }

    #[test]
    fn normalize_rejects_negative_literals_and_heavy_variables() {
        let f = formula(3, &[&[1, -2, 3]]);
        assert!(matches!(
            normalize_xsat(&f, NormalizeStrictness::ExactlyThreeOccurrences),
            Err(SatError::InvalidShape(_))
        ));
        let heavy = formula(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 2, 3], &[1, 3, 4]]);
        for strictness in [
            NormalizeStrictness::ExactlyThreeOccurrences,
            NormalizeStrictness::AtMostThreeOccurrences,
        ] {
            assert!(matches!(
                normalize_xsat(&heavy, strictness),
                Err(SatError::InvalidShape(_))
            ));
        }
    }

    #[test]
    fn gadget_block_admits_exactly_one_local_model() {
        // The three pure-gadget clauses force a2 and only a2.
        let f = formula(4, &[&[1, 2, 3], &[1, 2, 4], &[2, 3, 4]]);
        let mut models = Vec::new();
        for bits in 0..16u64 {
            let a = Assignment::from_bits(4, bits);
            if f.eval_exact(&a).unwrap() {
                models.push(a);
            }
        }
        assert_eq!(models.len(), 1);
        assert_eq!(models[0].values(), &[false, true, false, false]);
    }

    // ---- random instances ------------------------------------------------------

    #[test]
    fn random_t1_instances_are_deterministic_and_shaped() {
        let a = random_t1_instance(6, 5, 42).unwrap();
        let b = random_t1_instance(6, 5, 42).unwrap();
        assert_eq!(a, b);
        for seed in 0..25 {
            let f = random_t1_instance(6, 5, seed).unwrap();
            assert_eq!(f.num_vars(), 6);
            assert_eq!(f.num_clauses(), 5);
            assert!(validate_t1_shape(&f).is_valid(), "seed {seed}");
            for clause in f.clauses() {
                assert!(clause.len() == 2 || clause.len() == 3);
            }
        }
    }

    #[test]
    fn random_t1_fills_clauses_even_under_a_tight_budget() {
        // 3 clauses over 2 variables spend the budget of 6 occurrences
        // exactly, so every clause must come out with two literals.
        for seed in 0..10 {
            let f = random_t1_instance(2, 3, seed).unwrap();
            assert_eq!(f.num_clauses(), 3);
            assert!(f.clauses().iter().all(|c| c.len() == 2));
            assert!(validate_t1_shape(&f).is_valid());
        }
        for seed in 0..10 {
            let f = random_t1_instance(4, 6, seed).unwrap();
            assert_eq!(f.num_clauses(), 6);
            assert!(validate_t1_shape(&f).is_valid());
        }
    }

    #[test]
    fn random_t1_rejects_impossible_budgets() {
        // A two-literal clause needs two distinct variables.
        assert!(matches!(
            random_t1_instance(1, 1, 0),
            Err(SatError::InvalidArgument(_))
        ));
        assert!(matches!(
            random_t1_instance(2, 4, 0),
            Err(SatError::InvalidArgument(_))
        ));
        assert!(matches!(
            random_t1_instance(0, 1, 0),
            Err(SatError::InvalidArgument(_))
        ));
    }

    #[test]
    fn random_x3sat_instances_are_deterministic_and_shaped() {
        let a = random_x3sat_instance(7, 6, 9).unwrap();
        let b = random_x3sat_instance(7, 6, 9).unwrap();
        assert_eq!(a, b);
        for seed in 0..25 {
            let f = random_x3sat_instance(7, 6, seed).unwrap();
            assert_eq!(f.num_vars(), 7);
            assert_eq!(f.num_clauses(), 6);
            assert!(validate_t2_shape(&f).is_valid(), "seed {seed}");
        }
    }

    #[test]
    fn random_x3sat_handles_the_tightest_budget() {
        // num_clauses == num_vars uses every occurrence slot.
        for seed in 0..10 {
            let f = random_x3sat_instance(4, 4, seed).unwrap();
            assert!(validate_t2_shape(&f).is_valid(), "seed {seed}");
        }
    }

    #[test]
    fn random_x3sat_rejects_impossible_budgets() {
        assert!(matches!(
            random_x3sat_instance(4, 5, 0),
            Err(SatError::InvalidArgument(_))
        ));
        assert!(matches!(
            random_x3sat_instance(2, 1, 0),
            Err(SatError::InvalidArgument(_))
        ));
    }

    // ---- properties ---------------------------------------------------------------

    use proptest::prelude::*;

    /// Random small mixed-polarity formulas for oracle properties.
    fn arb_formula(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = CnfFormula> {
        (1..=max_vars).prop_flat_map(move |n| {
            let lit = (1..=n, any::<bool>()).prop_map(|(v, sign)| {
                if sign {
                    Lit::positive(v)
                } else {
                    Lit::negative(v)
                }
            });
            let clause = proptest::collection::vec(lit, 1..=3);
            proptest::collection::vec(clause, 0..=max_clauses)
                .prop_map(move |cs| CnfFormula::new(n, cs).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_sat_oracle_returns_the_first_model(f in arb_formula(8, 6)) {
            let n = f.num_vars();
            match brute_force_sat(&f).unwrap() {
                Some(model) => {
                    prop_assert_eq!(f.eval(&model), Ok(true));
                    // No earlier assignment may satisfy the formula.
                    for bits in 0..1u64 << n {
                        let a = Assignment::from_bits(n, bits);
                        if a == model {
                            break;
                        }
                        prop_assert_eq!(f.eval(&a), Ok(false));
                    }
                }
                None => {
                    for bits in 0..1u64 << n {
                        prop_assert_eq!(f.eval(&Assignment::from_bits(n, bits)), Ok(false));
                    }
                }
            }
        }

        #[test]
        fn prop_exact_models_are_models(f in arb_formula(8, 6)) {
            if let Some(model) = brute_force_xsat(&f).unwrap() {
                prop_assert_eq!(f.eval_exact(&model), Ok(true));
                prop_assert_eq!(f.eval(&model), Ok(true));
            }
        }

        #[test]
        fn prop_normalization_preserves_exact_satisfiability(
            seed in any::<u64>(),
            n in 3u32..=8,
            dup_clause in any::<proptest::sample::Index>(),
            make_dup in any::<bool>(),
        ) {
            let m = 1 + (seed % u64::from(n)) as u32;
            let mut f = random_x3sat_instance(n, m, seed).unwrap();
            if make_dup && f.num_clauses() > 0 {
                // Duplicate a literal inside one clause when the occurrence
                // budget allows, to exercise the forcing path.
                let j = dup_clause.index(f.num_clauses());
                let mut clauses: Vec<Vec<Lit>> = f.clauses().to_vec();
                let var = clauses[j][0].var();
                let occ: usize = clauses
                    .iter()
                    .flat_map(|c| c.iter())
                    .filter(|l| l.var() == var)
                    .count();
                if occ < 3 {
                    clauses[j][1] = Lit::positive(var);
                    f = CnfFormula::new(n, clauses).unwrap();
                }
            }
            let original_has_model = brute_force_xsat(&f).unwrap().is_some();
            match normalize_xsat(&f, NormalizeStrictness::AtMostThreeOccurrences).unwrap() {
                NormalizeOutcome::Unsatisfiable { .. } => prop_assert!(!original_has_model),
                NormalizeOutcome::Normalized { formula, provenance } => {
                    prop_assume!(formula.num_vars() <= ORACLE_VARIABLE_LIMIT);
                    match brute_force_xsat(&formula).unwrap() {
                        Some(model) => {
                            prop_assert!(original_has_model);
                            let restored = provenance.restore_assignment(&model).unwrap();
                            prop_assert_eq!(f.eval_exact(&restored), Ok(true));
                        }
                        None => prop_assert!(!original_has_model),
                    }
                    if let Some(orig_model) = brute_force_xsat(&f).unwrap() {
                        let lifted = provenance.lift_assignment(&orig_model).unwrap();
                        prop_assert_eq!(formula.eval_exact(&lifted), Ok(true));
                    }
                }
            }
        }
    }
}
