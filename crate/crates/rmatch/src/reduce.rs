//! The two SAT-to-graph constructions and the conversions between
//! assignments and matchings that make them effective.
//!
//! Both constructions share a vertex layout: one block per variable
//! (`u_i, f_i, t_i` at indices `3(i-1)..3(i-1)+2`), then one block per
//! clause (a hub `v_j` followed by one vertex per literal occurrence, in
//! clause order).  Canonical matchings pick exactly one edge per block:
//! `u_i f_i` when `x_i` is false, `u_i t_i` when it is true, and `v_j w` for
//! a true literal vertex `w` of clause `j`.
//!
//! * [`build_t1`] — variable blocks are triangles, clause blocks are cliques
//!   on the hub and the literal vertices, and `f_i`/`t_i` attach to the
//!   vertices of positive/negative occurrences of `x_i`.  The output has
//!   maximum degree four.  Its largest acyclic matching always has size
//!   `n + m`, and an induced matching of that size exists iff the formula
//!   is satisfiable.
//! * [`build_t2`] — variable blocks are `K_{1,2}` stars, clause blocks
//!   `K_{1,3}` stars (the input has exactly three distinct positive literals
//!   per clause); `f_i` attaches to the occurrence vertices of `x_i` and
//!   `t_i` to their clause-mates, so a second true literal in a clause
//!   breaks inducedness.  The output is bipartite with maximum degree seven.
//!   Its largest uniquely restricted matching always has size `n + m`, and
//!   an induced matching of that size exists iff the formula has an exact
//!   model.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder};
use crate::matching::{is_induced_matching, validate_matching, Matching, MatchingError};
use crate::sat::{
    validate_t1_shape, validate_t2_shape, Assignment, CnfFormula, SatError, ShapeReport,
};

/// Errors from building a construction or converting its witnesses.
#[derive(Debug, Error)]
pub enum ReduceError {
    /// The formula violates the construction's input contract.
    #[error("formula fails the input contract: {0}")]
    InvalidShape(ShapeReport),
    /// The caller handed in a witness that does not certify what it must.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A state the construction's guarantees rule out; reaching it means a
    /// bug in this library, not bad input.
    #[error("internal consistency failure: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// What a vertex of a construction stands for.  Serializes with a `kind`
/// tag: `{"kind":"f","var":2}`, `{"kind":"lit","clause":1,"pos":3}`, …
/// Variable, clause, and position indices are all 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VertexRole {
    /// Hub of the block for variable `var`.
    U { var: u32 },
    /// The "false" vertex of variable `var`.
    F { var: u32 },
    /// The "true" vertex of variable `var`.
    T { var: u32 },
    /// Hub of the block for clause `clause`.
    V { clause: u32 },
    /// The vertex of the `pos`-th literal of clause `clause`.
    Lit { clause: u32, pos: u32 },
}

impl VertexRole {
    /// The variable whose block this vertex belongs to, if any.
    fn block_var(self) -> Option<u32> {
        match self {
            VertexRole::U { var } | VertexRole::F { var } | VertexRole::T { var } => Some(var),
            _ => None,
        }
    }
}

/// A graph produced by one of the constructions, bundled with the role of
/// every vertex and the formula it encodes.
#[derive(Debug, Clone)]
pub struct ReductionGraph {
    graph: Graph,
    roles: Vec<VertexRole>,
    formula: CnfFormula,
    /// `clause_base[j]` is the vertex id of the hub `v_{j+1}`.
    clause_base: Vec<u32>,
}

impl ReductionGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn num_vars(&self) -> u32 {
        self.formula.num_vars()
    }

    pub fn num_clauses(&self) -> usize {
        self.formula.num_clauses()
    }

    /// Number of variable and clause blocks, `n + m`.  This is the size of
    /// every canonical matching, the largest acyclic matching size of the
    /// max-degree-four construction, and the largest uniquely restricted
    /// matching size of the bipartite one.
    pub fn block_count(&self) -> usize {
        self.num_vars() as usize + self.num_clauses()
    }

    /// Vertex id of the hub `u_i` (`var` is 1-based; panics out of range).
    pub fn u_vertex(&self, var: u32) -> u32 {
        assert!(var >= 1 && var <= self.num_vars(), "variable out of range");
        3 * (var - 1)
    }

    /// Vertex id of the "false" vertex `f_i`.
    pub fn f_vertex(&self, var: u32) -> u32 {
        self.u_vertex(var) + 1
    }

    /// Vertex id of the "true" vertex `t_i`.
    pub fn t_vertex(&self, var: u32) -> u32 {
        self.u_vertex(var) + 2
    }

    /// Vertex id of the hub `v_j` (`clause` is 1-based; panics out of range).
    pub fn v_vertex(&self, clause: usize) -> u32 {
        self.clause_base[clause - 1]
    }

    /// Vertex id of the `pos`-th literal of clause `clause` (both 1-based;
    /// panics out of range).
    pub fn literal_vertex(&self, clause: usize, pos: usize) -> u32 {
        let len = self.formula.clauses()[clause - 1].len();
        assert!(pos >= 1 && pos <= len, "literal position out of range");
        self.clause_base[clause - 1] + pos as u32
    }

    /// The role of vertex `v` (panics out of range).
    pub fn role(&self, v: u32) -> VertexRole {
        self.roles[v as usize]
    }
}

/// Allocate the shared block layout: vertices, roles, and labels, but no
/// edges yet.
fn allocate(f: &CnfFormula) -> (GraphBuilder, Vec<VertexRole>, Vec<u32>) {
    let n = f.num_vars();
    let total = 3 * n as usize + f.clauses().iter().map(|c| c.len() + 1).sum::<usize>();
    let mut builder = GraphBuilder::new(total);
    let mut roles = Vec::with_capacity(total);
    for i in 1..=n {
        let u = 3 * (i - 1);
        roles.push(VertexRole::U { var: i });
        roles.push(VertexRole::F { var: i });
        roles.push(VertexRole::T { var: i });
        builder.set_label(u, format!("u{i}")).expect("in range");
        builder.set_label(u + 1, format!("f{i}")).expect("in range");
        builder.set_label(u + 2, format!("t{i}")).expect("in range");
    }
    let mut clause_base = Vec::with_capacity(f.num_clauses());
    let mut next = 3 * n;
    for (j, clause) in f.clauses().iter().enumerate() {
        clause_base.push(next);
        roles.push(VertexRole::V {
            clause: j as u32 + 1,
        });
        builder
            .set_label(next, format!("v{}", j + 1))
            .expect("in range");
        for (p, lit) in clause.iter().enumerate() {
            roles.push(VertexRole::Lit {
                clause: j as u32 + 1,
                pos: p as u32 + 1,
            });
            builder
                .set_label(next + 1 + p as u32, format!("c{}{}", j + 1, lit))
                .expect("in range");
        }
        next += 1 + clause.len() as u32;
    }
    (builder, roles, clause_base)
}

/// Build the max-degree-four construction.  Rejects formulas that fail
/// [`validate_t1_shape`].
pub fn build_t1(f: &CnfFormula) -> Result<ReductionGraph, ReduceError> {
    let report = validate_t1_shape(f);
    if !report.is_valid() {
        return Err(ReduceError::InvalidShape(report));
    }
    let (mut builder, roles, clause_base) = allocate(f);
    for i in 1..=f.num_vars() {
        let u = 3 * (i - 1);
        builder.add_edge(u, u + 1).expect("in range");
        builder.add_edge(u, u + 2).expect("in range");
        builder.add_edge(u + 1, u + 2).expect("in range");
    }
    for (j, clause) in f.clauses().iter().enumerate() {
        let base = clause_base[j];
        let k = clause.len() as u32;
        for a in 0..=k {
            for b in a + 1..=k {
                builder.add_edge(base + a, base + b).expect("in range");
            }
        }
        for (p, lit) in clause.iter().enumerate() {
            let w = base + 1 + p as u32;
            let x = 3 * (lit.var() - 1);
            if lit.is_positive() {
                builder.add_edge(x + 1, w).expect("in range");
            } else {
                builder.add_edge(x + 2, w).expect("in range");
            }
        }
    }
    let graph = builder.freeze();
    debug_assert!(graph.max_degree() <= 4);
    Ok(ReductionGraph {
        graph,
        roles,
        formula: f.clone(),
        clause_base,
    })
}

/// Build the bipartite construction.  Rejects formulas that fail
/// [`validate_t2_shape`].
pub fn build_t2(f: &CnfFormula) -> Result<ReductionGraph, ReduceError> {
    let report = validate_t2_shape(f);
    if !report.is_valid() {
        return Err(ReduceError::InvalidShape(report));
    }
    let (mut builder, roles, clause_base) = allocate(f);
    for i in 1..=f.num_vars() {
        let u = 3 * (i - 1);
        builder.add_edge(u, u + 1).expect("in range");
        builder.add_edge(u, u + 2).expect("in range");
    }
    for (j, clause) in f.clauses().iter().enumerate() {
        let base = clause_base[j];
        for p in 0..clause.len() as u32 {
            builder.add_edge(base, base + 1 + p).expect("in range");
        }
        // `f` of each literal's variable attaches to the literal vertex
        // itself, `t` to the other vertices of the clause (the clause-mates).
        for (p, lit) in clause.iter().enumerate() {
            let w = base + 1 + p as u32;
            let x = 3 * (lit.var() - 1);
            builder.add_edge(x + 1, w).expect("in range");
            for (q, mate) in clause.iter().enumerate() {
                if q != p {
                    let y = 3 * (mate.var() - 1);
                    builder.add_edge(y + 2, w).expect("in range");
                }
            }
        }
    }
    let graph = builder.freeze();
    debug_assert!(graph.max_degree() <= 7);
    Ok(ReductionGraph {
        graph,
        roles,
        formula: f.clone(),
        clause_base,
    })
}

fn ordered(u: u32, v: u32) -> (u32, u32) {
    (u.min(v), u.max(v))
}

/// The canonical induced matching of the max-degree-four construction for a
/// satisfying assignment: `u_i f_i`/`u_i t_i` by truth value, plus `v_j w`
/// for the first true literal vertex `w` of each clause.
pub fn assignment_to_matching_t1(
    rg: &ReductionGraph,
    assignment: &Assignment,
) -> Result<Matching, ReduceError> {
    if !rg.formula.eval(assignment)? {
        return Err(ReduceError::InvalidArgument(
            "assignment does not satisfy the formula".into(),
        ));
    }
    let mut edges = Vec::with_capacity(rg.block_count());
    for i in 1..=rg.num_vars() {
        let value = assignment.value(i).expect("length checked by eval");
        let partner = if value {
            rg.t_vertex(i)
        } else {
            rg.f_vertex(i)
        };
        edges.push((rg.u_vertex(i), partner));
    }
    for (j, clause) in rg.formula.clauses().iter().enumerate() {
        let p = clause
            .iter()
            .position(|&lit| assignment.truth(lit))
            .expect("clause is satisfied");
        edges.push((rg.v_vertex(j + 1), rg.literal_vertex(j + 1, p + 1)));
    }
    let matching = Matching::new(edges);
    debug_assert!(validate_matching(&rg.graph, &matching).is_ok());
    debug_assert!(matches!(
        is_induced_matching(&rg.graph, &matching),
        Ok(true)
    ));
    Ok(matching)
}

/// The canonical induced matching of the bipartite construction for an
/// exact model: `u_i f_i`/`u_i t_i` by truth value, plus `v_j w` for the
/// unique true literal vertex `w` of each clause.
pub fn assignment_to_matching_t2(
    rg: &ReductionGraph,
    assignment: &Assignment,
) -> Result<Matching, ReduceError> {
    if !rg.formula.eval_exact(assignment)? {
        return Err(ReduceError::InvalidArgument(
            "assignment is not an exact model of the formula".into(),
        ));
    }
    let mut edges = Vec::with_capacity(rg.block_count());
    for i in 1..=rg.num_vars() {
        let value = assignment.value(i).expect("length checked by eval");
        let partner = if value {
            rg.t_vertex(i)
        } else {
            rg.f_vertex(i)
        };
        edges.push((rg.u_vertex(i), partner));
    }
    for (j, clause) in rg.formula.clauses().iter().enumerate() {
        let p = clause
            .iter()
            .position(|&lit| assignment.truth(lit))
            .expect("clause is exactly satisfied");
        edges.push((rg.v_vertex(j + 1), rg.literal_vertex(j + 1, p + 1)));
    }
    let matching = Matching::new(edges);
    debug_assert!(validate_matching(&rg.graph, &matching).is_ok());
    debug_assert!(matches!(
        is_induced_matching(&rg.graph, &matching),
        Ok(true)
    ));
    Ok(matching)
}

/// Shared preconditions of the reverse conversions: the matching must use
/// graph edges disjointly, be induced, and have exactly one edge per block.
fn check_reverse_input(rg: &ReductionGraph, matching: &Matching) -> Result<(), ReduceError> {
    validate_matching(&rg.graph, matching)?;
    if !is_induced_matching(&rg.graph, matching)? {
        return Err(ReduceError::InvalidArgument(
            "matching is not induced".into(),
        ));
    }
    if matching.len() != rg.block_count() {
        return Err(ReduceError::InvalidArgument(format!(
            "matching has {} edges but the construction requires {}",
            matching.len(),
            rg.block_count()
        )));
    }
    Ok(())
}

/// A matched edge with one endpoint in a variable block and the other in a
/// clause block, together with which variable block that is.
fn find_cross_edge(rg: &ReductionGraph, edges: &BTreeSet<(u32, u32)>) -> Option<(u32, u32, u32)> {
    for &(a, b) in edges {
        let (va, vb) = (rg.role(a).block_var(), rg.role(b).block_var());
        match (va, vb) {
            (Some(var), None) => return Some((a, b, var)),
            (None, Some(var)) => return Some((a, b, var)),
            _ => {}
        }
    }
    None
}

fn variable_block_end(rg: &ReductionGraph, a: u32, b: u32) -> u32 {
    if rg.role(a).block_var().is_some() {
        a
    } else {
        b
    }
}

fn ensure_free(edges: &BTreeSet<(u32, u32)>, vertex: u32, what: &str) -> Result<(), ReduceError> {
    if edges.iter().any(|&(a, b)| a == vertex || b == vertex) {
        return Err(ReduceError::InternalInconsistency(format!(
            "{what} is already matched, which an induced matching of full size rules out"
        )));
    }
    Ok(())
}

/// Read the assignment off the variable blocks of a canonical edge set.
fn read_assignment(
    rg: &ReductionGraph,
    edges: &BTreeSet<(u32, u32)>,
) -> Result<Assignment, ReduceError> {
    let mut values = Vec::with_capacity(rg.num_vars() as usize);
    for i in 1..=rg.num_vars() {
        let low = ordered(rg.u_vertex(i), rg.f_vertex(i));
        let high = ordered(rg.u_vertex(i), rg.t_vertex(i));
        if edges.contains(&low) {
            values.push(false);
        } else if edges.contains(&high) {
            values.push(true);
        } else {
            return Err(ReduceError::InternalInconsistency(format!(
                "variable block {i} has no hub edge after normalization"
            )));
        }
    }
    Ok(Assignment::new(values))
}

/// Recover a satisfying assignment from an induced matching of full size
/// `n + m` in the max-degree-four construction.
///
/// The matching is first normalized into canonical form by two exchange
/// rules, each of which preserves inducedness and size: a cross edge `uv`
/// with `u` in the block of variable `i` becomes `u_i u` (the hub is
/// necessarily free because the triangle rules out a second edge at the
/// block), and a triangle edge `f_i t_i` becomes `u_i f_i`.  Counting shows
/// a full-size induced matching can have no cross edges at all, so the
/// first rule is a safety net; both are bounded by the edge count.
pub fn matching_to_assignment_t1(
    rg: &ReductionGraph,
    matching: &Matching,
) -> Result<Assignment, ReduceError> {
    check_reverse_input(rg, matching)?;
    let mut edges: BTreeSet<(u32, u32)> = matching.edges().iter().copied().collect();
    let budget = rg.graph.edge_count();
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > budget + 1 {
            return Err(ReduceError::InternalInconsistency(
                "witness normalization exceeded its step budget".into(),
            ));
        }
        if let Some((a, b, var)) = find_cross_edge(rg, &edges) {
            let block_end = variable_block_end(rg, a, b);
            if block_end == rg.u_vertex(var) {
                return Err(ReduceError::InternalInconsistency(
                    "hub vertex carries a cross edge it has no incident edges for".into(),
                ));
            }
            let hub = rg.u_vertex(var);
            ensure_free(&edges, hub, "variable hub")?;
            edges.remove(&(a, b));
            edges.insert(ordered(hub, block_end));
            debug_assert!(matches!(
                is_induced_matching(&rg.graph, &Matching::new(edges.iter().copied())),
                Ok(true)
            ));
            continue;
        }
        // Triangle edges f_i t_i slide onto the hub.
        let triangle = edges.iter().copied().find(|&(a, b)| {
            matches!(
                (rg.role(a), rg.role(b)),
                (VertexRole::F { var: x }, VertexRole::T { var: y }) if x == y
            )
        });
        match triangle {
            Some((a, b)) => {
                let var = rg.role(a).block_var().expect("variable block edge");
                let hub = rg.u_vertex(var);
                ensure_free(&edges, hub, "variable hub")?;
                edges.remove(&(a, b));
                edges.insert(ordered(hub, rg.f_vertex(var)));
                debug_assert!(matches!(
                    is_induced_matching(&rg.graph, &Matching::new(edges.iter().copied())),
                    Ok(true)
                ));
            }
            None => break,
        }
    }
    let assignment = read_assignment(rg, &edges)?;
    if !rg.formula.eval(&assignment)? {
        return Err(ReduceError::InternalInconsistency(
            "normalized matching does not encode a satisfying assignment".into(),
        ));
    }
    Ok(assignment)
}

/// Recover an exact model from an induced matching of full size `n + m` in
/// the bipartite construction.
///
/// Exchange rules, each preserving inducedness and size: a variable block
/// with a single cross edge `uv` slides it onto the hub as `u_i u`; a block
/// with two cross edges `t_i v` and `f_i w` is rewritten to `u_i f_i` and
/// `v_j v`, where `v_j` is the hub of `v`'s clause (free, because `v` is
/// covered).  Counting shows a full-size induced matching has no cross
/// edges at all, so both rules are safety nets; the loop is bounded by the
/// edge count.
pub fn matching_to_assignment_t2(
    rg: &ReductionGraph,
    matching: &Matching,
) -> Result<Assignment, ReduceError> {
    check_reverse_input(rg, matching)?;
    let mut edges: BTreeSet<(u32, u32)> = matching.edges().iter().copied().collect();
    let budget = rg.graph.edge_count();
    let mut steps = 0usize;
    while let Some((_, _, var)) = find_cross_edge(rg, &edges) {
        steps += 1;
        if steps > budget + 1 {
            return Err(ReduceError::InternalInconsistency(
                "witness normalization exceeded its step budget".into(),
            ));
        }
        // Gather every cross edge of this variable's block.
        let crosses: Vec<(u32, u32)> = edges
            .iter()
            .copied()
            .filter(|&(x, y)| {
                let vx = rg.role(x).block_var();
                let vy = rg.role(y).block_var();
                (vx == Some(var) && vy.is_none()) || (vy == Some(var) && vx.is_none())
            })
            .collect();
        match crosses.len() {
            1 => {
                let (x, y) = crosses[0];
                let block_end = variable_block_end(rg, x, y);
                if block_end == rg.u_vertex(var) {
                    return Err(ReduceError::InternalInconsistency(
                        "hub vertex carries a cross edge it has no incident edges for".into(),
                    ));
                }
                let hub = rg.u_vertex(var);
                ensure_free(&edges, hub, "variable hub")?;
                edges.remove(&(x, y));
                edges.insert(ordered(hub, block_end));
            }
            2 => {
                // One cross from t_i and one from f_i; anything else would
                // match a block vertex twice.
                let mut true_partner = None;
                let mut false_cross = None;
                for &(x, y) in &crosses {
                    let block_end = variable_block_end(rg, x, y);
                    let other = if block_end == x { y } else { x };
                    if block_end == rg.t_vertex(var) {
                        true_partner = Some(other);
                    } else if block_end == rg.f_vertex(var) {
                        false_cross = Some((x, y));
                    }
                }
                let (Some(partner), Some(false_edge)) = (true_partner, false_cross) else {
                    return Err(ReduceError::InternalInconsistency(
                        "two cross edges at one block do not pair the true and false vertices"
                            .into(),
                    ));
                };
                let clause = match rg.role(partner) {
                    VertexRole::Lit { clause, .. } => clause as usize,
                    _ => {
                        return Err(ReduceError::InternalInconsistency(
                            "cross edge ends at a clause hub".into(),
                        ))
                    }
                };
                let hub = rg.u_vertex(var);
                let clause_hub = rg.v_vertex(clause);
                ensure_free(&edges, hub, "variable hub")?;
                ensure_free(&edges, clause_hub, "clause hub")?;
                let true_edge = ordered(rg.t_vertex(var), partner);
                edges.remove(&true_edge);
                edges.remove(&false_edge);
                edges.insert(ordered(hub, rg.f_vertex(var)));
                edges.insert(ordered(clause_hub, partner));
            }
            other => {
                return Err(ReduceError::InternalInconsistency(format!(
                    "variable block carries {other} cross edges"
                )));
            }
        }
        debug_assert!(matches!(
            is_induced_matching(&rg.graph, &Matching::new(edges.iter().copied())),
            Ok(true)
        ));
    }
    let assignment = read_assignment(rg, &edges)?;
    if !rg.formula.eval_exact(&assignment)? {
        return Err(ReduceError::InternalInconsistency(
            "normalized matching does not encode an exact model".into(),
        ));
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Bipartition;
    use crate::matching::MatchingKind;
    use crate::sat::{brute_force_sat, brute_force_xsat, Lit};
    use crate::solve::max_matching_number;

    fn formula(num_vars: u32, clauses: &[&[i32]]) -> CnfFormula {
        let clauses: Vec<Vec<Lit>> = clauses
            .iter()
            .map(|c| c.iter().map(|&l| Lit::new(l).unwrap()).collect())
            .collect();
        CnfFormula::new(num_vars, clauses).unwrap()
    }

    /// Two clauses over two variables: positive pair, then a negated first
    /// variable.  The construction has 2 triangles, 2 cliques on 3 vertices,
    /// and 4 cross edges.
    fn t1_reference() -> ReductionGraph {
        build_t1(&formula(2, &[&[1, 2], &[-1, 2]])).unwrap()
    }

    /// One positive three-literal clause over three variables.
    fn t2_reference() -> ReductionGraph {
        build_t2(&formula(3, &[&[1, 2, 3]])).unwrap()
    }

    #[test]
    fn t1_reference_layout_is_frozen() {
        let rg = t1_reference();
        let g = rg.graph();
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edge_count(), 16);
        assert_eq!(g.max_degree(), 4);
        assert_eq!(rg.block_count(), 4);
        // Variable blocks first, then clause blocks in clause order.
        assert_eq!(rg.role(0), VertexRole::U { var: 1 });
        assert_eq!(rg.role(1), VertexRole::F { var: 1 });
        assert_eq!(rg.role(2), VertexRole::T { var: 1 });
        assert_eq!(rg.role(5), VertexRole::T { var: 2 });
        assert_eq!(rg.role(6), VertexRole::V { clause: 1 });
        assert_eq!(rg.role(7), VertexRole::Lit { clause: 1, pos: 1 });
        assert_eq!(rg.role(9), VertexRole::V { clause: 2 });
        assert_eq!(rg.role(11), VertexRole::Lit { clause: 2, pos: 2 });
        assert_eq!(g.label(0), Some("u1"));
        assert_eq!(g.label(6), Some("v1"));
        assert_eq!(g.label(7), Some("c1x1"));
        assert_eq!(g.label(10), Some("c2-x1"));
        // Cross edges: f1-c1x1, f2-c1x2, t1-c2(-x1), f2-c2x2.
        assert!(g.has_edge(1, 7));
        assert!(g.has_edge(4, 8));
        assert!(g.has_edge(2, 10));
        assert!(g.has_edge(4, 11));
        // The hub u_i touches only its own triangle.
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn t2_reference_layout_is_frozen() {
        let rg = t2_reference();
        let g = rg.graph();
        assert_eq!(g.vertex_count(), 13);
        assert_eq!(g.edge_count(), 6 + 3 + 9);
        // Degrees: hubs u are 2, v is 3; f_i touches one occurrence, t_i the
        // two clause-mates.
        for i in 1..=3 {
            assert_eq!(g.degree(rg.u_vertex(i)), 2);
            assert_eq!(g.degree(rg.f_vertex(i)), 2);
            assert_eq!(g.degree(rg.t_vertex(i)), 3);
        }
        assert_eq!(g.degree(rg.v_vertex(1)), 3);
        for p in 1..=3 {
            assert_eq!(g.degree(rg.literal_vertex(1, p)), 4);
        }
        // No triangle edge f_i t_i, and no edges among literal vertices.
        assert!(!g.has_edge(rg.f_vertex(1), rg.t_vertex(1)));
        assert!(!g.has_edge(rg.literal_vertex(1, 1), rg.literal_vertex(1, 2)));
        // t1 attaches to the clause-mates of x1's occurrence, not to it.
        assert!(!g.has_edge(rg.t_vertex(1), rg.literal_vertex(1, 1)));
        assert!(g.has_edge(rg.t_vertex(1), rg.literal_vertex(1, 2)));
        assert!(g.has_edge(rg.t_vertex(1), rg.literal_vertex(1, 3)));
        assert!(matches!(g.is_bipartite(), Bipartition::TwoColoring { .. }));
    }

    #[test]
    fn t2_outputs_stay_bipartite_with_degree_at_most_seven() {
        let f = formula(5, &[&[1, 2, 3], &[1, 2, 4], &[1, 2, 5], &[3, 4, 5]]);
        let rg = build_t2(&f).unwrap();
        assert!(rg.graph().max_degree() <= 7);
        assert!(matches!(
            rg.graph().is_bipartite(),
            Bipartition::TwoColoring { .. }
        ));
        // x1 and x2 occur three times, so t-vertices reach degree 7.
        assert_eq!(rg.graph().degree(rg.t_vertex(1)), 7);
        assert_eq!(rg.graph().degree(rg.f_vertex(1)), 4);
    }

    #[test]
    fn constructions_reject_bad_shapes() {
        assert!(matches!(
            build_t1(&formula(2, &[&[1]])),
            Err(ReduceError::InvalidShape(_))
        ));
        assert!(matches!(
            build_t2(&formula(3, &[&[1, 2]])),
            Err(ReduceError::InvalidShape(_))
        ));
        assert!(matches!(
            build_t2(&formula(3, &[&[1, -2, 3]])),
            Err(ReduceError::InvalidShape(_))
        ));
    }

    #[test]
    fn unused_variables_become_isolated_blocks() {
        let rg = build_t1(&formula(3, &[&[1, 2]])).unwrap();
        // x3's triangle is a component of its own.
        assert_eq!(rg.graph().neighbors(rg.u_vertex(3)), &[7, 8]);
        assert_eq!(rg.graph().neighbors(rg.f_vertex(3)), &[6, 8]);
        assert_eq!(rg.graph().neighbors(rg.t_vertex(3)), &[6, 7]);

        let rg = build_t2(&formula(4, &[&[1, 2, 3]])).unwrap();
        assert_eq!(rg.graph().degree(rg.f_vertex(4)), 1);
        assert_eq!(rg.graph().degree(rg.t_vertex(4)), 1);
    }

    #[test]
    fn vertex_roles_serialize_with_kind_tags() {
        let role = VertexRole::Lit { clause: 1, pos: 3 };
        assert_eq!(
            serde_json::to_string(&role).unwrap(),
            r#"{"kind":"lit","clause":1,"pos":3}"#
        );
        assert_eq!(
            serde_json::to_string(&VertexRole::U { var: 2 }).unwrap(),
            r#"{"kind":"u","var":2}"#
        );
        let back: VertexRole = serde_json::from_str(r#"{"kind":"t","var":7}"#).unwrap();
        assert_eq!(back, VertexRole::T { var: 7 });
    }

    #[test]
    fn t1_forward_witness_is_the_canonical_matching() {
        let rg = t1_reference();
        let a = Assignment::new(vec![false, true]);
        let m = assignment_to_matching_t1(&rg, &a).unwrap();
        // u1 f1, u2 t2, v1-c1x2 (first true literal), v2-c2(-x1).
        assert_eq!(m.edges(), &[(0, 1), (3, 5), (6, 8), (9, 10)]);
        assert!(is_induced_matching(rg.graph(), &m).unwrap());
        // Full size equals the solver's maximum.
        let best = max_matching_number(rg.graph(), MatchingKind::Induced).unwrap();
        assert_eq!(best.value, rg.block_count());
    }

    #[test]
    fn t1_rejects_non_models_and_undersized_matchings() {
        let rg = t1_reference();
        let a = Assignment::new(vec![true, false]);
        assert!(!rg.formula().eval(&a).unwrap());
        assert!(matches!(
            assignment_to_matching_t1(&rg, &a),
            Err(ReduceError::InvalidArgument(_))
        ));
        let small = Matching::new([(0u32, 1u32)]);
        assert!(matches!(
            matching_to_assignment_t1(&rg, &small),
            Err(ReduceError::InvalidArgument(_))
        ));
        let not_induced = Matching::new([(0u32, 1u32), (2u32, 10u32), (3u32, 5u32), (6u32, 8u32)]);
        assert!(matches!(
            matching_to_assignment_t1(&rg, &not_induced),
            Err(ReduceError::InvalidArgument(_))
        ));
    }

    #[test]
    fn t1_round_trip_is_identity_on_canonical_matchings() {
        let f = formula(3, &[&[1, 2], &[-1, 3], &[2, 3]]);
        let rg = build_t1(&f).unwrap();
        for bits in 0..8u64 {
            let a = Assignment::from_bits(3, bits);
            if !f.eval(&a).unwrap() {
                continue;
            }
            let m = assignment_to_matching_t1(&rg, &a).unwrap();
            let back = matching_to_assignment_t1(&rg, &m).unwrap();
            assert_eq!(back, a);
        }
    }

    #[test]
    fn t1_reverse_slides_triangle_edges_onto_the_hub() {
        let rg = t1_reference();
        // f1 t1 plus u2 t2: clause 1 must use its x2 vertex and clause 2 its
        // x2 vertex, keeping both w-neighbors of f1 and t1 free.
        let m = Matching::new([(1u32, 2u32), (3u32, 5u32), (6u32, 8u32), (9u32, 11u32)]);
        assert!(is_induced_matching(rg.graph(), &m).unwrap());
        let a = matching_to_assignment_t1(&rg, &m).unwrap();
        // The triangle edge reads as "x1 false".
        assert_eq!(a.values(), &[false, true]);
    }

    #[test]
    fn t2_forward_witness_is_the_canonical_matching() {
        let rg = t2_reference();
        let a = Assignment::new(vec![false, true, false]);
        let m = assignment_to_matching_t2(&rg, &a).unwrap();
        // u1 f1, u2 t2, u3 f3, v1-c1x2.
        assert_eq!(m.edges(), &[(0, 1), (3, 5), (6, 7), (9, 11)]);
        assert!(is_induced_matching(rg.graph(), &m).unwrap());
        let best = max_matching_number(rg.graph(), MatchingKind::Induced).unwrap();
        assert_eq!(best.value, rg.block_count());
    }

    #[test]
    fn t2_rejects_non_exact_models() {
        let rg = t2_reference();
        // Two true literals satisfy the clause but not exactly.
        let a = Assignment::new(vec![true, true, false]);
        assert!(rg.formula().eval(&a).unwrap());
        assert!(matches!(
            assignment_to_matching_t2(&rg, &a),
            Err(ReduceError::InvalidArgument(_))
        ));
    }

    #[test]
    fn t2_round_trip_is_identity_on_canonical_matchings() {
        let f = formula(4, &[&[1, 2, 3], &[2, 3, 4]]);
        let rg = build_t2(&f).unwrap();
        let mut seen = 0;
        for bits in 0..16u64 {
            let a = Assignment::from_bits(4, bits);
            if !f.eval_exact(&a).unwrap() {
                continue;
            }
            seen += 1;
            let m = assignment_to_matching_t2(&rg, &a).unwrap();
            let back = matching_to_assignment_t2(&rg, &m).unwrap();
            assert_eq!(back, a);
        }
        assert!(seen > 0);
    }

    #[test]
    fn full_size_induced_matchings_carry_no_cross_edges() {
        // Empirical check of the counting argument the reverse conversions
        // lean on: every maximum induced matching pairs vertices inside
        // blocks only.  Enumerate all induced matchings of full size via the
        // solver's witness plus brute force over the reference instances.
        for rg in [t1_reference(), t2_reference()] {
            let g = rg.graph();
            let edges: Vec<(u32, u32)> = g.edges().to_vec();
            let full = rg.block_count();
            let mut stack = vec![(0usize, Vec::new())];
            while let Some((i, chosen)) = stack.pop() {
                if chosen.len() == full {
                    let m = Matching::new(chosen.iter().copied());
                    if is_induced_matching(g, &m).unwrap() {
                        let set: BTreeSet<(u32, u32)> = m.edges().iter().copied().collect();
                        assert!(find_cross_edge(&rg, &set).is_none(), "{m:?}");
                    }
                    continue;
                }
                if i >= edges.len() {
                    continue;
                }
                stack.push((i + 1, chosen.clone()));
                let mut with = chosen.clone();
                with.push(edges[i]);
                let m = Matching::new(with.iter().copied());
                if m.len() == with.len()
                    && validate_matching(g, &m).is_ok()
                    && is_induced_matching(g, &m).unwrap()
                {
                    stack.push((i + 1, with));
                }
            }
        }
    }

    #[test]
    fn solver_agrees_with_oracles_on_reference_instances() {
        // Satisfiable instance: the maximum induced matching reaches n + m.
        let sat = formula(2, &[&[1, 2], &[-1, 2]]);
        assert!(brute_force_sat(&sat).unwrap().is_some());
        let rg = build_t1(&sat).unwrap();
        let induced = max_matching_number(rg.graph(), MatchingKind::Induced).unwrap();
        let acyclic = max_matching_number(rg.graph(), MatchingKind::Acyclic).unwrap();
        assert_eq!(acyclic.value, rg.block_count());
        assert_eq!(induced.value, acyclic.value);

        // Exactly satisfiable instance for the bipartite construction.
        let xsat = formula(3, &[&[1, 2, 3]]);
        assert!(brute_force_xsat(&xsat).unwrap().is_some());
        let rg = build_t2(&xsat).unwrap();
        let induced = max_matching_number(rg.graph(), MatchingKind::Induced).unwrap();
        let ur = max_matching_number(rg.graph(), MatchingKind::UniquelyRestricted).unwrap();
        assert_eq!(ur.value, rg.block_count());
        assert_eq!(induced.value, ur.value);
    }
}
