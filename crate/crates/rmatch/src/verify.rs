//! Replaying the constructions' counting and equivalence claims on single
//! instances and on whole corpora.
//!
//! Each `verify_*` function checks one claim against the brute-force
//! oracles and the exact solvers, and reports every comparison it made as a
//! `(name, expected, actual, pass)` record with its elapsed time.
//! [`run_corpus`] maps one of the checks over an exhaustive or seeded-random
//! instance corpus and aggregates the outcome, sorted by instance id.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::matching::MatchingKind;
use crate::reduce::{
    assignment_to_matching_t1, assignment_to_matching_t2, build_t1, build_t2,
    matching_to_assignment_t1, matching_to_assignment_t2, ReduceError,
};
use crate::sat::{
    brute_force_sat, brute_force_xsat, normalize_xsat, random_t1_instance, random_x3sat_instance,
    validate_t2_shape, Assignment, CnfFormula, Lit, NormalizeOutcome, NormalizeStrictness,
    SatError,
};
use crate::solve::{max_matching_number, SolveError};

/// Errors from a verification run: bad input shapes or resource limits.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// One comparison inside a verification report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
    pub elapsed_ms: f64,
}

/// Everything checked for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    /// Deterministic instance id; corpus reports sort by it.
    pub instance: String,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Line-delimited records with a stable field order.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "instance={} check={} expected={} actual={} pass={} elapsed_ms={:.3}\n",
                self.instance, c.name, c.expected, c.actual, c.pass, c.elapsed_ms
            ));
        }
        out
    }
}

/// Which claim a corpus run replays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// The max-degree-four construction always has a largest acyclic
    /// matching of size `n + m`.
    Lemma1,
    /// Satisfiability is equivalent to its acyclic and induced maxima
    /// agreeing.
    Theorem1,
    /// The bipartite construction always has a largest uniquely restricted
    /// matching of size `n + m`.
    Lemma4,
    /// Exact satisfiability is equivalent to its uniquely restricted and
    /// induced maxima agreeing.
    Theorem2,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Lemma1 => "lemma1",
            CheckKind::Theorem1 => "thm1",
            CheckKind::Lemma4 => "lemma4",
            CheckKind::Theorem2 => "thm2",
        }
    }

    /// Does this check consume max-degree-four instances (as opposed to
    /// bipartite ones)?
    pub fn uses_t1(self) -> bool {
        matches!(self, CheckKind::Lemma1 | CheckKind::Theorem1)
    }
}

/// Where a corpus comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusSource {
    /// Every valid instance with at most this many variables and clauses.
    Exhaustive { max_vars: u32, max_clauses: usize },
    /// `count` seeded random instances at the default size bounds.
    Random { count: usize, seed: u64 },
}

/// A corpus run: one claim over one instance stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec {
    pub check: CheckKind,
    pub source: CorpusSource,
}

/// Aggregate of a corpus run; `reports` is sorted by instance id.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusReport {
    pub check: String,
    pub instances: usize,
    pub failures: usize,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
}

impl CorpusReport {
    /// Line-delimited records: every instance's checks, then an aggregate.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&r.to_lines());
        }
        out.push_str(&format!(
            "aggregate check={} instances={} failures={} pass={}\n",
            self.check, self.instances, self.failures, self.pass
        ));
        out
    }
}

/// Default exhaustive bounds for the max-degree-four corpus.
pub const DEFAULT_T1_EXHAUSTIVE: (u32, usize) = (3, 2);
/// Default exhaustive bounds for the bipartite corpus.
pub const DEFAULT_T2_EXHAUSTIVE: (u32, usize) = (5, 2);
/// Default instance count for seeded-random corpora.
pub const DEFAULT_RANDOM_COUNT: usize = 100;

fn instance_id(prefix: &str, f: &CnfFormula) -> String {
    let clauses: Vec<String> = f
        .clauses()
        .iter()
        .map(|c| {
            c.iter()
                .map(|l| l.code().to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    format!(
        "{prefix}[n={},m={}|{}]",
        f.num_vars(),
        f.num_clauses(),
        clauses.join(";")
    )
}

fn bit_string(a: &Assignment) -> String {
    if a.is_empty() {
        return "-".into();
    }
    a.values()
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect()
}

fn timed_check(
    name: &str,
    expected: String,
    run: impl FnOnce() -> Result<String, VerifyError>,
) -> Result<CheckResult, VerifyError> {
    let start = Instant::now();
    let actual = run()?;
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(CheckResult {
        name: name.into(),
        pass: expected == actual,
        expected,
        actual,
        elapsed_ms,
    })
}

/// Check that the max-degree-four construction's largest acyclic matching
/// has size `n + m`.
pub fn verify_lemma1(f: &CnfFormula) -> Result<VerificationReport, VerifyError> {
    let rg = build_t1(f)?;
    let check = timed_check(
        "acyclic-maximum-is-block-count",
        rg.block_count().to_string(),
        || {
            Ok(max_matching_number(rg.graph(), MatchingKind::Acyclic)?
                .value
                .to_string())
        },
    )?;
    Ok(VerificationReport {
        instance: instance_id("t1", f),
        checks: vec![check],
    })
}

/// Check the biconditional of the max-degree-four construction, plus the
/// witness round-trip when the oracle finds a model.
pub fn verify_theorem1(f: &CnfFormula) -> Result<VerificationReport, VerifyError> {
    let rg = build_t1(f)?;
    let mut checks = Vec::new();

    let start = Instant::now();
    let model = brute_force_sat(f)?;
    let acyclic = max_matching_number(rg.graph(), MatchingKind::Acyclic)?.value;
    let induced = max_matching_number(rg.graph(), MatchingKind::Induced)?.value;
    checks.push(CheckResult {
        name: "equality-tracks-satisfiability".into(),
        expected: model.is_some().to_string(),
        actual: (acyclic == induced).to_string(),
        pass: model.is_some() == (acyclic == induced),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    });

    if let Some(model) = model {
        let start = Instant::now();
        let witness = assignment_to_matching_t1(&rg, &model)?;
        checks.push(CheckResult {
            name: "forward-witness-has-full-size".into(),
            expected: rg.block_count().to_string(),
            actual: witness.len().to_string(),
            pass: witness.len() == rg.block_count(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        let start = Instant::now();
        let back = matching_to_assignment_t1(&rg, &witness)?;
        checks.push(CheckResult {
            name: "witness-round-trip-is-identity".into(),
            expected: bit_string(&model),
            actual: bit_string(&back),
            pass: back == model,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(VerificationReport {
        instance: instance_id("t1", f),
        checks,
    })
}

/// Check that the bipartite construction's largest uniquely restricted
/// matching has size `n + m`.
pub fn verify_lemma4(f: &CnfFormula) -> Result<VerificationReport, VerifyError> {
    let rg = build_t2(f)?;
    let check = timed_check(
        "uniquely-restricted-maximum-is-block-count",
        rg.block_count().to_string(),
        || {
            Ok(
                max_matching_number(rg.graph(), MatchingKind::UniquelyRestricted)?
                    .value
                    .to_string(),
            )
        },
    )?;
    Ok(VerificationReport {
        instance: instance_id("t2", f),
        checks: vec![check],
    })
}

/// Check the biconditional of the bipartite construction, plus the witness
/// round-trip when the oracle finds an exact model.
///
/// Inputs that fail the construction's shape check but are in the source
/// form (positive, clause size three, exactly three occurrences per
/// variable) are normalized first; a decisive "unsatisfiable" normalization
/// verdict short-circuits to an oracle agreement check.
pub fn verify_theorem2(f: &CnfFormula) -> Result<VerificationReport, VerifyError> {
    let shape = validate_t2_shape(f);
    let mut checks = Vec::new();
    let target = if shape.is_valid() {
        f.clone()
    } else {
        match normalize_xsat(f, NormalizeStrictness::ExactlyThreeOccurrences) {
            Ok(NormalizeOutcome::Normalized { formula, .. }) => {
                let start = Instant::now();
                let original = brute_force_xsat(f)?.is_some();
                let rewritten = brute_force_xsat(&formula)?.is_some();
                checks.push(CheckResult {
                    name: "normalization-preserves-exact-satisfiability".into(),
                    expected: original.to_string(),
                    actual: rewritten.to_string(),
                    pass: original == rewritten,
                    elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                });
                formula
            }
            Ok(NormalizeOutcome::Unsatisfiable { .. }) => {
                let check = timed_check(
                    "unsatisfiable-verdict-agrees-with-oracle",
                    "false".into(),
                    || Ok(brute_force_xsat(f)?.is_some().to_string()),
                )?;
                return Ok(VerificationReport {
                    instance: instance_id("t2", f),
                    checks: vec![check],
                });
            }
            Err(SatError::InvalidShape(_)) => {
                // Neither construction-ready nor source form: report the
                // construction's own shape violations.
                return Err(ReduceError::InvalidShape(shape).into());
            }
            Err(e) => return Err(e.into()),
        }
    };

    let rg = build_t2(&target)?;
    let start = Instant::now();
    let model = brute_force_xsat(&target)?;
    let ur = max_matching_number(rg.graph(), MatchingKind::UniquelyRestricted)?.value;
    let induced = max_matching_number(rg.graph(), MatchingKind::Induced)?.value;
    checks.push(CheckResult {
        name: "equality-tracks-exact-satisfiability".into(),
        expected: model.is_some().to_string(),
        actual: (ur == induced).to_string(),
        pass: model.is_some() == (ur == induced),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    });

    if let Some(model) = model {
        let start = Instant::now();
        let witness = assignment_to_matching_t2(&rg, &model)?;
        checks.push(CheckResult {
            name: "forward-witness-has-full-size".into(),
            expected: rg.block_count().to_string(),
            actual: witness.len().to_string(),
            pass: witness.len() == rg.block_count(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        let start = Instant::now();
        let back = matching_to_assignment_t2(&rg, &witness)?;
        checks.push(CheckResult {
            name: "witness-round-trip-is-identity".into(),
            expected: bit_string(&model),
            actual: bit_string(&back),
            pass: back == model,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(VerificationReport {
        instance: instance_id("t2", f),
        checks,
    })
}

/// Run one claim over a whole corpus; the report is sorted by instance id.
pub fn run_corpus(spec: &CorpusSpec) -> Result<CorpusReport, VerifyError> {
    let formulas = match spec.source {
        CorpusSource::Exhaustive {
            max_vars,
            max_clauses,
        } => {
            if spec.check.uses_t1() {
                enumerate_t1_instances(max_vars, max_clauses)
            } else {
                enumerate_t2_instances(max_vars, max_clauses)
            }
        }
        CorpusSource::Random { count, seed } => random_corpus(spec.check, count, seed)?,
    };
    let mut reports = Vec::with_capacity(formulas.len());
    for f in &formulas {
        let report = match spec.check {
            CheckKind::Lemma1 => verify_lemma1(f)?,
            CheckKind::Theorem1 => verify_theorem1(f)?,
            CheckKind::Lemma4 => verify_lemma4(f)?,
            CheckKind::Theorem2 => verify_theorem2(f)?,
        };
        reports.push(report);
    }
    reports.sort_by(|a, b| a.instance.cmp(&b.instance));
    let failures = reports.iter().filter(|r| !r.pass()).count();
    Ok(CorpusReport {
        check: spec.check.as_str().into(),
        instances: reports.len(),
        failures,
        pass: failures == 0,
        reports,
    })
}

/// Seeded random instances at the default size bounds of each corpus.
fn random_corpus(kind: CheckKind, count: usize, seed: u64) -> Result<Vec<CnfFormula>, SatError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            if kind.uses_t1() {
                let n = rng.gen_range(2..=4);
                let m = rng.gen_range(1..=3);
                random_t1_instance(n, m, rng.gen())
            } else {
                let n = rng.gen_range(3..=5);
                let m = rng.gen_range(1..=3);
                random_x3sat_instance(n, m, rng.gen())
            }
        })
        .collect()
}

/// Every formula accepted by the max-degree-four shape check with
/// `1..=max_vars` variables and `1..=max_clauses` clauses, enumerated as
/// ordered lists over all valid clause patterns (sorted literal multisets
/// of size two or three).
pub fn enumerate_t1_instances(max_vars: u32, max_clauses: usize) -> Vec<CnfFormula> {
    let mut out = Vec::new();
    for n in 1..=max_vars {
        let patterns = t1_clause_patterns(n);
        let mut current: Vec<Vec<Lit>> = Vec::new();
        extend_t1(n, &patterns, &mut current, max_clauses, &mut out);
    }
    out
}

fn t1_clause_patterns(n: u32) -> Vec<Vec<Lit>> {
    let lits: Vec<Lit> = (1..=n)
        .flat_map(|v| [Lit::positive(v), Lit::negative(v)])
        .collect();
    let k = lits.len();
    let mut patterns = Vec::new();
    let mut consider = |clause: Vec<Lit>| {
        let f = CnfFormula::new(n, vec![clause.clone()]).expect("literals in range");
        if crate::sat::validate_t1_shape(&f).is_valid() {
            patterns.push(clause);
        }
    };
    for a in 0..k {
        for b in a..k {
            consider(vec![lits[a], lits[b]]);
            for c in b..k {
                consider(vec![lits[a], lits[b], lits[c]]);
            }
        }
    }
    patterns
}

fn extend_t1(
    n: u32,
    patterns: &[Vec<Lit>],
    current: &mut Vec<Vec<Lit>>,
    max_clauses: usize,
    out: &mut Vec<CnfFormula>,
) {
    for p in patterns {
        current.push(p.clone());
        let f = CnfFormula::new(n, current.clone()).expect("literals in range");
        // Occurrence counts only grow with more clauses, so an invalid
        // prefix can be pruned outright.
        if crate::sat::validate_t1_shape(&f).is_valid() {
            out.push(f);
            if current.len() < max_clauses {
                extend_t1(n, patterns, current, max_clauses, out);
            }
        }
        current.pop();
    }
}

/// Every formula accepted by the bipartite shape check with `1..=max_vars`
/// variables and `1..=max_clauses` clauses, enumerated as ordered lists of
/// sorted three-variable clauses.
pub fn enumerate_t2_instances(max_vars: u32, max_clauses: usize) -> Vec<CnfFormula> {
    let mut out = Vec::new();
    for n in 3..=max_vars.max(2) {
        let mut patterns = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    patterns.push(vec![Lit::positive(a), Lit::positive(b), Lit::positive(c)]);
                }
            }
        }
        let mut current: Vec<Vec<Lit>> = Vec::new();
        extend_t2(n, &patterns, &mut current, max_clauses, &mut out);
    }
    out
}

fn extend_t2(
    n: u32,
    patterns: &[Vec<Lit>],
    current: &mut Vec<Vec<Lit>>,
    max_clauses: usize,
    out: &mut Vec<CnfFormula>,
) {
    for p in patterns {
        current.push(p.clone());
        let f = CnfFormula::new(n, current.clone()).expect("literals in range");
        if validate_t2_shape(&f).is_valid() {
            out.push(f);
            if current.len() < max_clauses {
                extend_t2(n, patterns, current, max_clauses, out);
            }
        }
        current.pop();
    }
}

/// Every source-form instance with `1..=max_vars` variables: positive
/// clauses of size three (duplicates allowed) with every variable occurring
/// exactly three times, which forces exactly `n` clauses.  Clause lists are
/// enumerated as sorted multisets, so reorderings are not repeated.
pub fn enumerate_source_form_instances(max_vars: u32) -> Vec<CnfFormula> {
    let mut out = Vec::new();
    for n in 1..=max_vars {
        let mut types: Vec<[u32; 3]> = Vec::new();
        for a in 1..=n {
            for b in a..=n {
                for c in b..=n {
                    types.push([a, b, c]);
                }
            }
        }
        let mut remaining = vec![3u8; n as usize + 1];
        let mut chosen: Vec<usize> = Vec::new();
        source_form_rec(n, &types, 0, &mut chosen, &mut remaining, &mut out);
    }
    out
}

fn source_form_rec(
    n: u32,
    types: &[[u32; 3]],
    start: usize,
    chosen: &mut Vec<usize>,
    remaining: &mut Vec<u8>,
    out: &mut Vec<CnfFormula>,
) {
    if chosen.len() == n as usize {
        if remaining[1..].iter().all(|&r| r == 0) {
            let clauses: Vec<Vec<Lit>> = chosen
                .iter()
                .map(|&ti| types[ti].iter().map(|&v| Lit::positive(v)).collect())
                .collect();
            out.push(CnfFormula::new(n, clauses).expect("literals in range"));
        }
        return;
    }
    for ti in start..types.len() {
        let t = types[ti];
        let fits = t
            .iter()
            .all(|&v| t.iter().filter(|&&w| w == v).count() as u8 <= remaining[v as usize]);
        if !fits {
            continue;
        }
        for &v in &t {
            remaining[v as usize] -= 1;
        }
        chosen.push(ti);
        source_form_rec(n, types, ti, chosen, remaining, out);
        chosen.pop();
        for &v in &t {
            remaining[v as usize] += 1;
        }
    }
}

/// A fixed unsatisfiable instance of the max-degree-four shape.  The first
/// four clauses force `x1` and `x3` true, and the last one then fails:
/// `(x1 ∨ x2)(x1 ∨ ¬x2)(x3 ∨ x4)(x3 ∨ ¬x4)(¬x1 ∨ ¬x3)`.
///
/// Instances this small are rare: with at most three clauses of two or more
/// literals, at most `3·2^{n-2} < 2^n` assignments are excluded, so every
/// shape-valid formula with `m <= 3` is satisfiable.
pub fn unsatisfiable_t1_example() -> CnfFormula {
    let clause = |lits: &[i32]| -> Vec<Lit> {
        lits.iter()
            .map(|&l| Lit::new(l).expect("nonzero"))
            .collect()
    };
    CnfFormula::new(
        4,
        vec![
            clause(&[1, 2]),
            clause(&[1, -2]),
            clause(&[3, 4]),
            clause(&[3, -4]),
            clause(&[-1, -3]),
        ],
    )
    .expect("in range")
}

/// The smallest positive three-clause shape without an exact model: all
/// four three-subsets of four variables.  Any exact model would give each
/// clause exactly one true variable, but every pair of clauses shares two
/// variables, which pins an impossible occurrence pattern.
pub fn exactly_unsatisfiable_t2_example() -> CnfFormula {
    let clause = |vars: &[u32]| -> Vec<Lit> { vars.iter().map(|&v| Lit::positive(v)).collect() };
    CnfFormula::new(
        4,
        vec![
            clause(&[1, 2, 3]),
            clause(&[1, 2, 4]),
            clause(&[1, 3, 4]),
            clause(&[2, 3, 4]),
        ],
    )
    .expect("in range")
}
