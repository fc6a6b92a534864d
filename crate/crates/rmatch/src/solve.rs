//! Exact solvers for the four matching numbers.
//!
//! One branch-and-bound enumerator serves every kind: edges are branched on
//! in ascending `(u, v)` order, include before exclude, and only strict
//! improvements replace the incumbent.  Because the visit order of complete
//! matchings coincides with lexicographic order on their sorted edge lists,
//! the reported witness is the lexicographically smallest among all maximum
//! matchings of the requested kind — deterministically, for any input.
//!
//! Feasibility of adding an edge is checked incrementally, exploiting that
//! every kind is hereditary (a partial matching that already violates the
//! kind can never be extended into one that satisfies it):
//!
//! * induced — the new endpoints must have no covered neighbors,
//! * acyclic — a rollback union-find tracks the components of `G(M)`,
//! * uniquely restricted — matched-bridge peeling of the component of
//!   `G(M)` touched by the new edge (older components stay clean by the
//!   invariant),
//! * ordinary — endpoint availability only.
//!
//! The bound is `|M| + min(remaining edges, floor(u/2))` where `u` counts
//! uncovered vertices incident to not-yet-branched edges.

use thiserror::Error;

use crate::graph::Graph;
use crate::matching::{Matching, MatchingKind};

/// Default cap on the host graph's vertex count.
pub const DEFAULT_VERTEX_LIMIT: usize = 40;

/// Hard cap — solver state lives in 64-bit masks.
pub const MAX_VERTEX_LIMIT: usize = 64;

/// Errors reported by the solvers.  A resource limit is an error, never a
/// wrong answer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("graph has {vertices} vertices, above the solve limit of {limit}")]
    TooManyVertices { vertices: usize, limit: usize },
}

/// Outcome of an exact solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    /// The maximum size of a matching of the requested kind.
    pub value: usize,
    /// A maximum matching attaining `value` — the lexicographically
    /// smallest one.
    pub witness: Matching,
    /// Number of branch nodes visited (diagnostic, deterministic).
    pub explored_nodes: u64,
}

/// Maximum matching number of the given kind under the default vertex limit.
pub fn max_matching_number(g: &Graph, kind: MatchingKind) -> Result<SolveResult, SolveError> {
    max_matching_number_with_limit(g, kind, DEFAULT_VERTEX_LIMIT)
}

/// Maximum matching number with a caller-chosen vertex limit (values above
/// [`MAX_VERTEX_LIMIT`] are clamped to it).
pub fn max_matching_number_with_limit(
    g: &Graph,
    kind: MatchingKind,
    limit: usize,
) -> Result<SolveResult, SolveError> {
    let limit = limit.min(MAX_VERTEX_LIMIT);
    let n = g.vertex_count();
    if n > limit {
        return Err(SolveError::TooManyVertices { vertices: n, limit });
    }
    let rows = g.adjacency_masks().expect("vertex count fits in 64 bits");
    let edges: Vec<(u32, u32)> = g.edges().to_vec();
    // suffix_incidence[i]: vertices incident to some edge in edges[i..].
    let mut suffix_incidence = vec![0u64; edges.len() + 1];
    for i in (0..edges.len()).rev() {
        let (u, v) = edges[i];
        suffix_incidence[i] = suffix_incidence[i + 1] | (1 << u) | (1 << v);
    }
    let mut search = Search {
        rows: &rows,
        edges: &edges,
        suffix_incidence: &suffix_incidence,
        kind,
        covered: 0,
        chosen: Vec::new(),
        partner: vec![u32::MAX; n],
        dsu: RollbackDsu::new(n),
        best: Vec::new(),
        best_size: 0,
        nodes: 0,
    };
    search.dfs(0);
    let witness = Matching::new(search.best.iter().copied());
    debug_assert_eq!(witness.len(), search.best_size);
    debug_assert_eq!(kind.holds(g, &witness), Ok(true));
    Ok(SolveResult {
        value: search.best_size,
        witness,
        explored_nodes: search.nodes,
    })
}

/// Do the two matching numbers coincide on `g`?
pub fn equality_holds(g: &Graph, a: MatchingKind, b: MatchingKind) -> Result<bool, SolveError> {
    Ok(max_matching_number(g, a)?.value == max_matching_number(g, b)?.value)
}

struct Search<'a> {
    rows: &'a [u64],
    edges: &'a [(u32, u32)],
    suffix_incidence: &'a [u64],
    kind: MatchingKind,
    covered: u64,
    chosen: Vec<(u32, u32)>,
    /// Matched partner per covered vertex (`u32::MAX` when free).
    partner: Vec<u32>,
    /// Components of `G(M)` for the acyclic kind.
    dsu: RollbackDsu,
    best: Vec<(u32, u32)>,
    best_size: usize,
    nodes: u64,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize) {
        self.nodes += 1;
        let reachable = (self.suffix_incidence[i] & !self.covered).count_ones() as usize / 2;
        let bound = self.chosen.len() + reachable.min(self.edges.len() - i);
        if bound <= self.best_size {
            return;
        }
        // The bound check already returned when no edges remain.
        let (u, v) = self.edges[i];
        let bits = (1u64 << u) | (1 << v);
        if self.covered & bits == 0 {
            if let Some(undo) = self.try_extend(u, v) {
                self.covered |= bits;
                self.partner[u as usize] = v;
                self.partner[v as usize] = u;
                self.chosen.push((u, v));
                if self.chosen.len() > self.best_size {
                    self.best_size = self.chosen.len();
                    self.best = self.chosen.clone();
                }
                self.dfs(i + 1);
                self.chosen.pop();
                self.partner[u as usize] = u32::MAX;
                self.partner[v as usize] = u32::MAX;
                self.covered &= !bits;
                if let Undo::DsuMark(mark) = undo {
                    self.dsu.rollback(mark);
                }
            }
        }
        self.dfs(i + 1);
    }

    /// Kind-specific feasibility of extending the current matching with the
    /// edge `(u, v)` whose endpoints are free.  On success the returned undo
    /// token records any retained auxiliary state.
    fn try_extend(&mut self, u: u32, v: u32) -> Option<Undo> {
        match self.kind {
            MatchingKind::Ordinary => Some(Undo::None),
            MatchingKind::Induced => {
                let touching = (self.rows[u as usize] | self.rows[v as usize]) & self.covered;
                (touching == 0).then_some(Undo::None)
            }
            MatchingKind::Acyclic => {
                let mark = self.dsu.mark();
                // New edges of G(M'): (u,v) plus edges from u and v into the
                // previously covered set.  Any union that closes a cycle
                // rejects the extension.
                let mut ok = self.dsu.union(u as usize, v as usize);
                if ok {
                    'outer: for (x, x_adj) in
                        [(u, self.rows[u as usize]), (v, self.rows[v as usize])]
                    {
                        let mut nbrs = x_adj & self.covered;
                        while nbrs != 0 {
                            let w = nbrs.trailing_zeros();
                            nbrs &= nbrs - 1;
                            if !self.dsu.union(x as usize, w as usize) {
                                ok = false;
                                break 'outer;
                            }
                        }
                    }
                }
                if ok {
                    Some(Undo::DsuMark(mark))
                } else {
                    self.dsu.rollback(mark);
                    None
                }
            }
            MatchingKind::UniquelyRestricted => {
                // Tentatively add the pair, peel the touched component.
                let bits = (1u64 << u) | (1 << v);
                self.covered |= bits;
                self.partner[u as usize] = v;
                self.partner[v as usize] = u;
                let component = mask_component(self.rows, self.covered, u);
                let cycle = mask_peel_has_cycle(self.rows, component, &self.partner);
                self.partner[u as usize] = u32::MAX;
                self.partner[v as usize] = u32::MAX;
                self.covered &= !bits;
                (!cycle).then_some(Undo::None)
            }
        }
    }
}

enum Undo {
    None,
    DsuMark(usize),
}

/// Connected component of `start` in the subgraph on `alive` vertices.
fn mask_component(rows: &[u64], alive: u64, start: u32) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let x = f.trailing_zeros();
            f &= f - 1;
            next |= rows[x as usize] & alive & !seen;
        }
        seen |= next;
        frontier = next;
    }
    seen
}

/// Does the subgraph on `alive` (a union of matched pairs) contain an
/// alternating cycle?  Peels matched bridges until empty or stuck.
fn mask_peel_has_cycle(rows: &[u64], mut alive: u64, partner: &[u32]) -> bool {
    while alive != 0 {
        let bridge_pairs = mask_bridges(rows, alive);
        let mut removed = 0u64;
        for &(x, y) in &bridge_pairs {
            if partner[x as usize] == y {
                removed |= (1 << x) | (1 << y);
            }
        }
        if removed == 0 {
            return true;
        }
        alive &= !removed;
    }
    false
}

/// Bridges of the subgraph on `alive`, as `(min, max)` pairs.
fn mask_bridges(rows: &[u64], alive: u64) -> Vec<(u32, u32)> {
    let mut disc = [u32::MAX; 64];
    let mut low = [0u32; 64];
    let mut timer = 0u32;
    let mut out = Vec::new();
    let mut roots = alive;
    while roots != 0 {
        let r = roots.trailing_zeros();
        roots &= roots - 1;
        if disc[r as usize] == u32::MAX {
            bridge_dfs(
                r,
                u32::MAX,
                rows,
                alive,
                &mut disc,
                &mut low,
                &mut timer,
                &mut out,
            );
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn bridge_dfs(
    v: u32,
    parent: u32,
    rows: &[u64],
    alive: u64,
    disc: &mut [u32; 64],
    low: &mut [u32; 64],
    timer: &mut u32,
    out: &mut Vec<(u32, u32)>,
) {
    disc[v as usize] = *timer;
    low[v as usize] = *timer;
    *timer += 1;
    let mut nbrs = rows[v as usize] & alive;
    while nbrs != 0 {
        let w = nbrs.trailing_zeros();
        nbrs &= nbrs - 1;
        if w == parent {
            continue;
        }
        if disc[w as usize] == u32::MAX {
            bridge_dfs(w, v, rows, alive, disc, low, timer, out);
            low[v as usize] = low[v as usize].min(low[w as usize]);
            if low[w as usize] > disc[v as usize] {
                out.push((v.min(w), v.max(w)));
            }
        } else {
            low[v as usize] = low[v as usize].min(disc[w as usize]);
        }
    }
}

/// Union-find with union by size and an undo log (no path compression, so
/// rollback is exact).
struct RollbackDsu {
    parent: Vec<u32>,
    size: Vec<u32>,
    log: Vec<(u32, u32)>,
}

impl RollbackDsu {
    fn new(n: usize) -> RollbackDsu {
        RollbackDsu {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            log: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            x = self.parent[x] as usize;
        }
        x
    }

    /// False iff `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        self.log.push((rb as u32, ra as u32));
        true
    }

    fn mark(&self) -> usize {
        self.log.len()
    }

    fn rollback(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (child, root) = self.log.pop().expect("log entries remain");
            self.parent[child as usize] = child;
            self.size[root as usize] -= self.size[child as usize];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::validate_matching;

    fn values(g: &Graph) -> [usize; 4] {
        let get = |k| max_matching_number(g, k).unwrap().value;
        [
            get(MatchingKind::Ordinary),
            get(MatchingKind::UniquelyRestricted),
            get(MatchingKind::Acyclic),
            get(MatchingKind::Induced),
        ]
    }

    // ---- reference values -----------------------------------------------

    #[test]
    fn c4_values_drop_to_one_for_restricted_kinds() {
        assert_eq!(values(&Graph::cycle(4)), [2, 1, 1, 1]);
    }

    #[test]
    fn p4_only_induced_value_drops() {
        assert_eq!(values(&Graph::path(4)), [2, 2, 2, 1]);
    }

    #[test]
    fn p5_all_values_equal_two() {
        assert_eq!(values(&Graph::path(5)), [2, 2, 2, 2]);
    }

    #[test]
    fn k4_restricted_values_are_one() {
        assert_eq!(values(&Graph::complete(4)), [2, 1, 1, 1]);
    }

    #[test]
    fn c6_and_c7_reference_values() {
        assert_eq!(values(&Graph::cycle(6)), [3, 2, 2, 2]);
        assert_eq!(values(&Graph::cycle(7)), [3, 3, 3, 2]);
    }

    #[test]
    fn edgeless_graph_solves_to_zero() {
        let g = Graph::from_edges(5, &[]).unwrap();
        for kind in MatchingKind::ALL {
            let r = max_matching_number(&g, kind).unwrap();
            assert_eq!(r.value, 0);
            assert!(r.witness.is_empty());
        }
    }

    // ---- witnesses ---------------------------------------------------------

    #[test]
    fn witness_is_lexicographically_smallest_maximum() {
        let r = max_matching_number(&Graph::cycle(4), MatchingKind::Ordinary).unwrap();
        assert_eq!(r.witness.edges(), &[(0, 1), (2, 3)]);
        let r = max_matching_number(&Graph::complete(4), MatchingKind::Ordinary).unwrap();
        assert_eq!(r.witness.edges(), &[(0, 1), (2, 3)]);
        // P5 induced: both {01,34} and … — smallest is (0,1),(3,4).
        let r = max_matching_number(&Graph::path(5), MatchingKind::Induced).unwrap();
        assert_eq!(r.witness.edges(), &[(0, 1), (3, 4)]);
    }

    #[test]
    fn witness_satisfies_requested_kind() {
        for n in 3..=7 {
            let g = Graph::cycle(n);
            for kind in MatchingKind::ALL {
                let r = max_matching_number(&g, kind).unwrap();
                assert!(validate_matching(&g, &r.witness).is_ok());
                assert_eq!(kind.holds(&g, &r.witness), Ok(true));
            }
        }
    }

    #[test]
    fn repeated_solves_are_deterministic() {
        let g = Graph::complete(6);
        let a = max_matching_number(&g, MatchingKind::UniquelyRestricted).unwrap();
        let b = max_matching_number(&g, MatchingKind::UniquelyRestricted).unwrap();
        assert_eq!(a, b);
        assert!(a.explored_nodes > 0);
    }

    // ---- limits -------------------------------------------------------------

    #[test]
    fn vertex_limit_is_enforced_and_overridable() {
        let g = Graph::from_edges(41, &[(0, 1)]).unwrap();
        assert_eq!(
            max_matching_number(&g, MatchingKind::Ordinary),
            Err(SolveError::TooManyVertices {
                vertices: 41,
                limit: DEFAULT_VERTEX_LIMIT
            })
        );
        let r = max_matching_number_with_limit(&g, MatchingKind::Ordinary, 50).unwrap();
        assert_eq!(r.value, 1);
        // The hard cap cannot be raised.
        let big = Graph::from_edges(70, &[(0, 1)]).unwrap();
        assert_eq!(
            max_matching_number_with_limit(&big, MatchingKind::Ordinary, 1000),
            Err(SolveError::TooManyVertices {
                vertices: 70,
                limit: MAX_VERTEX_LIMIT
            })
        );
    }

    // ---- equality ---------------------------------------------------------------

    #[test]
    fn equality_holds_reference_cases() {
        use MatchingKind::*;
        // C4: every restricted number is 1.
        assert_eq!(equality_holds(&Graph::cycle(4), Acyclic, Induced), Ok(true));
        // P4: uniquely restricted 2, induced 1.
        assert_eq!(
            equality_holds(&Graph::path(4), UniquelyRestricted, Induced),
            Ok(false)
        );
    }

    // ---- oracles ------------------------------------------------------------------

    /// Enumerate every matching of `g` (as normalized edge lists) and keep
    /// the best of the kind — the naive reference the solver must equal.
    fn naive_max(g: &Graph, kind: MatchingKind) -> (usize, Vec<(u32, u32)>) {
        fn recurse(
            g: &Graph,
            kind: MatchingKind,
            edges: &[(u32, u32)],
            i: usize,
            current: &mut Vec<(u32, u32)>,
            best: &mut (usize, Vec<(u32, u32)>),
        ) {
            let mm = Matching::new(current.iter().copied());
            if kind.holds(g, &mm).unwrap() && mm.len() > best.0 {
                *best = (mm.len(), current.clone());
            }
            if i == edges.len() {
                return;
            }
            let (u, v) = edges[i];
            let used = current
                .iter()
                .any(|&(a, b)| a == u || b == u || a == v || b == v);
            if !used {
                current.push((u, v));
                recurse(g, kind, edges, i + 1, current, best);
                current.pop();
            }
            recurse(g, kind, edges, i + 1, current, best);
        }
        let mut best = (0, Vec::new());
        recurse(g, kind, g.edges(), 0, &mut Vec::new(), &mut best);
        best
    }

    /// Maximum ordinary matching on a bipartite graph by augmenting paths.
    fn bipartite_matching_number(g: &Graph) -> Option<usize> {
        let left = match g.is_bipartite() {
            crate::graph::Bipartition::TwoColoring { left, .. } => left,
            crate::graph::Bipartition::OddCycle(_) => return None,
        };
        let n = g.vertex_count();
        let mut match_of = vec![u32::MAX; n];
        let mut size = 0;
        for u in left.iter() {
            let mut seen = vec![false; n];
            if augment(g, u, &mut seen, &mut match_of) {
                size += 1;
            }
        }
        return Some(size);

        fn augment(g: &Graph, u: u32, seen: &mut [bool], match_of: &mut [u32]) -> bool {
            for &w in g.neighbors(u) {
                if seen[w as usize] {
                    continue;
                }
                seen[w as usize] = true;
                if match_of[w as usize] == u32::MAX
                    || augment(g, match_of[w as usize], seen, match_of)
                {
                    match_of[w as usize] = u;
                    return true;
                }
            }
            false
        }
    }

    #[test]
    fn solver_equals_naive_enumeration_on_all_tiny_graphs() {
        // Every labeled graph on up to 5 vertices.
        for n in 1..=5usize {
            let pairs: Vec<(u32, u32)> = (0..n as u32)
                .flat_map(|u| ((u + 1)..n as u32).map(move |v| (u, v)))
                .collect();
            for mask in 0u32..(1 << pairs.len()) {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = Graph::from_edges(n, &edges).unwrap();
                for kind in MatchingKind::ALL {
                    let fast = max_matching_number(&g, kind).unwrap();
                    let (naive_value, _) = naive_max(&g, kind);
                    assert_eq!(
                        fast.value, naive_value,
                        "kind {kind} disagreed on n={n} mask={mask:b}"
                    );
                }
            }
        }
    }

    use proptest::prelude::*;

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let max_edges = n * (n - 1) / 2;
            proptest::collection::vec(any::<bool>(), max_edges).prop_map(move |picks| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n as u32 {
                    for v in (u + 1)..n as u32 {
                        if picks[k] {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
                Graph::from_edges(n, &edges).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]

        #[test]
        fn prop_solver_matches_naive(g in arb_graph(7)) {
            for kind in MatchingKind::ALL {
                let fast = max_matching_number(&g, kind).unwrap();
                let (naive_value, _) = naive_max(&g, kind);
                prop_assert_eq!(fast.value, naive_value, "kind {}", kind);
            }
        }

        #[test]
        fn prop_matching_numbers_form_chain(g in arb_graph(8)) {
            let [nu, ur, ac, s] = [
                MatchingKind::Ordinary,
                MatchingKind::UniquelyRestricted,
                MatchingKind::Acyclic,
                MatchingKind::Induced,
            ]
            .map(|k| max_matching_number(&g, k).unwrap().value);
            prop_assert!(nu >= ur && ur >= ac && ac >= s);
        }

        #[test]
        fn prop_ordinary_matches_augmenting_paths_on_bipartite(g in arb_graph(9)) {
            if let Some(reference) = bipartite_matching_number(&g) {
                let fast = max_matching_number(&g, MatchingKind::Ordinary).unwrap();
                prop_assert_eq!(fast.value, reference);
            }
        }
    }
}
