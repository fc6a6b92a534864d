//! Matchings and their restricted kinds.
//!
//! For a matching `M` of `G`, let `G(M)` denote the subgraph of `G` induced
//! by the vertices covered by `M`.  Then `M` is
//!
//! * **induced** iff `G(M)` is 1-regular,
//! * **acyclic** iff `G(M)` is a forest,
//! * **uniquely restricted** iff `M` is the only perfect matching of `G(M)`,
//!   equivalently iff `G` has no `M`-alternating cycle.
//!
//! Unique restriction is decided by two independent routes that are
//! cross-checked in the test suites: counting perfect matchings of `G(M)`
//! ([`is_uniquely_restricted_by_pm_count`]) and searching for an alternating
//! cycle ([`is_uniquely_restricted`] / [`find_alternating_cycle`]).  The
//! cycle search peels matched bridge edges: a graph whose sole perfect
//! matching is `M` always contains a matched bridge, removing the two
//! endpoints of a matched bridge preserves both existence and absence of
//! alternating cycles, and a non-empty remainder without matched bridges
//! certifies an alternating cycle.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, VertexSet};

/// Errors for matching validation and text I/O.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    /// A listed edge is absent from the host graph (or degenerate).
    #[error("edge ({u}, {v}) is not an edge of the host graph")]
    EdgeNotInGraph { u: u32, v: u32 },
    /// Two matching edges share an endpoint.
    #[error("vertex {0} is covered by more than one matching edge")]
    SharedVertex(u32),
    /// Perfect-matching counting is limited to 64 vertices.
    #[error("operation limited to 64 vertices, got {vertices}")]
    TooLarge { vertices: usize },
    /// Malformed matching file text.
    #[error("matching parse error: {0}")]
    Parse(String),
}

/// A set of edges, normalized to `(min, max)` pairs in ascending order.
///
/// A `Matching` is a plain value; whether it actually is a matching of a
/// particular graph is checked by [`validate_matching`], which every
/// classifier calls first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    edges: Vec<(u32, u32)>,
}

impl Matching {
    /// Normalize an edge collection: orient each pair as `(min, max)`,
    /// sort, drop duplicates.
    pub fn new(edges: impl IntoIterator<Item = (u32, u32)>) -> Matching {
        let set: BTreeSet<(u32, u32)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        Matching {
            edges: set.into_iter().collect(),
        }
    }

    pub fn empty() -> Matching {
        Matching { edges: Vec::new() }
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, u: u32, v: u32) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// The set of vertices covered by the matching.
    pub fn covered_vertices(&self) -> VertexSet {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    /// Serialize as `m <u> <v>` lines with 1-based vertex ids.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&format!("m {} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Parse `m <u> <v>` lines (1-based ids); `c` comments and blank lines
    /// are ignored.
    pub fn from_text(text: &str) -> Result<Matching, MatchingError> {
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: String| MatchingError::Parse(format!("line {}: {}", lineno + 1, msg));
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            if tokens.next() != Some("m") {
                return Err(err("expected 'm <u> <v>'".into()));
            }
            let u: u32 = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("bad endpoint".into()))?;
            let v: u32 = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("bad endpoint".into()))?;
            if tokens.next().is_some() {
                return Err(err("trailing tokens".into()));
            }
            if u == 0 || v == 0 {
                return Err(err("vertex ids are 1-based".into()));
            }
            edges.push((u - 1, v - 1));
        }
        Ok(Matching::new(edges))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "}}")
    }
}

/// The four matching kinds, ordered by containment of the classes:
/// every induced matching is acyclic, every acyclic matching is uniquely
/// restricted, and every matching is ordinary.  Consequently
/// `Induced < Acyclic < UniquelyRestricted < Ordinary`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatchingKind {
    Induced,
    Acyclic,
    UniquelyRestricted,
    Ordinary,
}

impl MatchingKind {
    /// All kinds in ascending order.
    pub const ALL: [MatchingKind; 4] = [
        MatchingKind::Induced,
        MatchingKind::Acyclic,
        MatchingKind::UniquelyRestricted,
        MatchingKind::Ordinary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchingKind::Induced => "induced",
            MatchingKind::Acyclic => "acyclic",
            MatchingKind::UniquelyRestricted => "uniquely-restricted",
            MatchingKind::Ordinary => "ordinary",
        }
    }

    /// Does `m` satisfy this kind's predicate in `g`?
    pub fn holds(self, g: &Graph, m: &Matching) -> Result<bool, MatchingError> {
        match self {
            MatchingKind::Induced => is_induced_matching(g, m),
            MatchingKind::Acyclic => is_acyclic_matching(g, m),
            MatchingKind::UniquelyRestricted => is_uniquely_restricted(g, m),
            MatchingKind::Ordinary => validate_matching(g, m).map(|_| true),
        }
    }
}

impl fmt::Display for MatchingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Check that `m` is a matching of `g`: every edge exists in `g` and no two
/// edges share an endpoint.
pub fn validate_matching(g: &Graph, m: &Matching) -> Result<(), MatchingError> {
    for &(u, v) in m.edges() {
        if u == v || !g.has_edge(u, v) {
            return Err(MatchingError::EdgeNotInGraph { u, v });
        }
    }
    let mut endpoints: Vec<u32> = m.edges().iter().flat_map(|&(u, v)| [u, v]).collect();
    endpoints.sort_unstable();
    for pair in endpoints.windows(2) {
        if pair[0] == pair[1] {
            return Err(MatchingError::SharedVertex(pair[0]));
        }
    }
    Ok(())
}

/// Compact view of `G(M)`: the covered vertices renumbered `0..c-1` in
/// ascending order of original id, with adjacency restricted to covered
/// vertices and the matched partner of each vertex.
struct CoveredView {
    orig: Vec<u32>,
    adj: Vec<Vec<u32>>,
    partner: Vec<u32>,
}

fn covered_view(g: &Graph, m: &Matching) -> Result<CoveredView, MatchingError> {
    validate_matching(g, m)?;
    let mut orig: Vec<u32> = m.edges().iter().flat_map(|&(u, v)| [u, v]).collect();
    orig.sort_unstable();
    let idx = |v: u32| orig.binary_search(&v).ok().map(|i| i as u32);
    let mut adj = vec![Vec::new(); orig.len()];
    for (i, &v) in orig.iter().enumerate() {
        for &w in g.neighbors(v) {
            if let Some(j) = idx(w) {
                adj[i].push(j);
            }
        }
    }
    let mut partner = vec![0u32; orig.len()];
    for &(u, v) in m.edges() {
        let (i, j) = (idx(u).expect("covered"), idx(v).expect("covered"));
        partner[i as usize] = j;
        partner[j as usize] = i;
    }
    Ok(CoveredView { orig, adj, partner })
}

/// Is `m` an induced matching of `g`?  True iff `G(M)` is 1-regular, i.e.
/// every covered vertex's only covered neighbor is its matched partner.
pub fn is_induced_matching(g: &Graph, m: &Matching) -> Result<bool, MatchingError> {
    let view = covered_view(g, m)?;
    Ok(view
        .adj
        .iter()
        .zip(view.partner.iter())
        .all(|(row, &p)| row.as_slice() == [p]))
}

/// Is `m` an acyclic matching of `g`?  True iff `G(M)` is a forest.
pub fn is_acyclic_matching(g: &Graph, m: &Matching) -> Result<bool, MatchingError> {
    let view = covered_view(g, m)?;
    let mut dsu = Dsu::new(view.orig.len());
    for (i, row) in view.adj.iter().enumerate() {
        for &j in row {
            if (j as usize) > i && !dsu.union(i, j as usize) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Count the perfect matchings of `g` by recursively matching the
/// lowest-index uncovered vertex with each of its neighbors.
///
/// The graph with no vertices has exactly one (empty) perfect matching.
/// Limited to 64 vertices.
pub fn count_perfect_matchings(g: &Graph) -> Result<u64, MatchingError> {
    let rows = g.adjacency_masks().ok_or(MatchingError::TooLarge {
        vertices: g.vertex_count(),
    })?;
    let alive = if g.vertex_count() == 64 {
        u64::MAX
    } else {
        (1u64 << g.vertex_count()) - 1
    };
    Ok(count_pm_masks(&rows, alive))
}

fn count_pm_masks(rows: &[u64], alive: u64) -> u64 {
    if alive == 0 {
        return 1;
    }
    let u = alive.trailing_zeros();
    let mut total = 0;
    let mut nbrs = rows[u as usize] & alive;
    while nbrs != 0 {
        let v = nbrs.trailing_zeros();
        nbrs &= nbrs - 1;
        total += count_pm_masks(rows, alive & !(1 << u) & !(1 << v));
    }
    total
}

/// Decide unique restriction by counting the perfect matchings of `G(M)`:
/// `m` is uniquely restricted iff the count is exactly one.
///
/// Independent of the alternating-cycle route; the two must always agree.
pub fn is_uniquely_restricted_by_pm_count(g: &Graph, m: &Matching) -> Result<bool, MatchingError> {
    let view = covered_view(g, m)?;
    let c = view.orig.len();
    if c > 64 {
        return Err(MatchingError::TooLarge { vertices: c });
    }
    let mut rows = vec![0u64; c];
    for (i, row) in view.adj.iter().enumerate() {
        for &j in row {
            rows[i] |= 1 << j;
        }
    }
    let alive = if c == 64 { u64::MAX } else { (1u64 << c) - 1 };
    Ok(count_pm_masks(&rows, alive) == 1)
}

/// Decide unique restriction by alternating-cycle search; true iff no
/// `m`-alternating cycle exists, i.e. [`find_alternating_cycle`] would
/// return `None`.
pub fn is_uniquely_restricted(g: &Graph, m: &Matching) -> Result<bool, MatchingError> {
    let view = covered_view(g, m)?;
    Ok(peel_matched_bridges(&view).is_none())
}

/// An `M`-alternating cycle: an even-length vertex cycle whose edges are
/// alternately inside and outside `M`, starting with a matched edge, with
/// the closing edge (last vertex back to first) unmatched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingCycle {
    pub vertices: Vec<u32>,
}

impl AlternatingCycle {
    /// Number of vertices (equals the number of edges).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The cycle's edges in order, including the closing edge.
    pub fn edge_cycle(&self) -> Vec<(u32, u32)> {
        let k = self.vertices.len();
        (0..k)
            .map(|i| (self.vertices[i], self.vertices[(i + 1) % k]))
            .collect()
    }

    /// Full soundness check: distinct vertices, even length >= 4, all edges
    /// present in `g`, strict alternation starting with a matched edge.
    pub fn is_alternating_in(&self, g: &Graph, m: &Matching) -> bool {
        let k = self.vertices.len();
        if k < 4 || !k.is_multiple_of(2) {
            return false;
        }
        let distinct: BTreeSet<u32> = self.vertices.iter().copied().collect();
        if distinct.len() != k {
            return false;
        }
        for (i, (u, v)) in self.edge_cycle().into_iter().enumerate() {
            if !g.has_edge(u, v) {
                return false;
            }
            if m.contains_edge(u, v) != (i % 2 == 0) {
                return false;
            }
        }
        true
    }
}

/// Search for an `m`-alternating cycle in `g`.
///
/// Returns `None` exactly when `m` is uniquely restricted.  The witness is
/// deterministic for a given input.
///
/// # Panics
///
/// Panics if `m` is not a matching of `g`; validate first when the input is
/// untrusted.
pub fn find_alternating_cycle(g: &Graph, m: &Matching) -> Option<AlternatingCycle> {
    let view = covered_view(g, m).expect("find_alternating_cycle requires a valid matching");
    let alive = peel_matched_bridges(&view)?;
    // A non-empty bridge-free remainder has a second perfect matching;
    // the symmetric difference with M decomposes into alternating cycles.
    let second = second_perfect_matching(&view, &alive)
        .expect("a matched-bridge-free remainder admits a second perfect matching");
    let start = (0..alive.len())
        .find(|&i| alive[i] && second[i] != view.partner[i])
        .expect("the two perfect matchings differ somewhere");
    let mut vertices = vec![view.orig[start]];
    let mut cur = view.partner[start];
    loop {
        vertices.push(view.orig[cur as usize]);
        let next = second[cur as usize];
        if next as usize == start {
            break;
        }
        vertices.push(view.orig[next as usize]);
        cur = view.partner[next as usize];
    }
    Some(AlternatingCycle { vertices })
}

/// Repeatedly delete the endpoints of matched bridge edges.  Returns `None`
/// if everything peels away (no alternating cycle), otherwise the alive
/// flags of the stuck remainder, which is guaranteed to contain one.
fn peel_matched_bridges(view: &CoveredView) -> Option<Vec<bool>> {
    let c = view.orig.len();
    let mut alive = vec![true; c];
    let mut remaining = c;
    loop {
        if remaining == 0 {
            return None;
        }
        let bridge_set = bridges(&view.adj, &alive);
        let mut removed = false;
        for i in 0..c {
            let p = view.partner[i] as usize;
            if i < p && alive[i] {
                let key = (i as u32, view.partner[i]);
                if bridge_set.contains(&key) {
                    alive[i] = false;
                    alive[p] = false;
                    remaining -= 2;
                    removed = true;
                }
            }
        }
        if !removed {
            return Some(alive);
        }
    }
}

/// Bridges of the subgraph on `alive` vertices, as `(min, max)` pairs.
/// Iterative lowlink DFS.
fn bridges(adj: &[Vec<u32>], alive: &[bool]) -> BTreeSet<(u32, u32)> {
    const UNSEEN: u32 = u32::MAX;
    let n = adj.len();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut timer = 0u32;
    let mut out = BTreeSet::new();

    struct Frame {
        v: u32,
        parent: u32,
        next: usize,
    }

    for root in 0..n {
        if !alive[root] || disc[root] != UNSEEN {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut stack = vec![Frame {
            v: root as u32,
            parent: u32::MAX,
            next: 0,
        }];
        while let Some(top) = stack.last_mut() {
            let v = top.v as usize;
            let parent = top.parent;
            let next = top.next;
            if next < adj[v].len() {
                top.next += 1;
                let w = adj[v][next];
                if !alive[w as usize] || w == parent {
                    continue;
                }
                if disc[w as usize] == UNSEEN {
                    disc[w as usize] = timer;
                    low[w as usize] = timer;
                    timer += 1;
                    stack.push(Frame {
                        v: w,
                        parent: v as u32,
                        next: 0,
                    });
                } else {
                    low[v] = low[v].min(disc[w as usize]);
                }
            } else {
                let done = stack.pop().expect("non-empty");
                if let Some(parent_frame) = stack.last() {
                    let pv = parent_frame.v as usize;
                    let dv = done.v as usize;
                    low[pv] = low[pv].min(low[dv]);
                    if low[dv] > disc[pv] {
                        out.insert((done.v.min(parent_frame.v), done.v.max(parent_frame.v)));
                    }
                }
            }
        }
    }
    out
}

/// Find a perfect matching of the alive part of the view that differs from
/// the restriction of `M`, if one exists.  Returns the partner table of the
/// first differing perfect matching in deterministic search order.
fn second_perfect_matching(view: &CoveredView, alive: &[bool]) -> Option<Vec<u32>> {
    const FREE: u32 = u32::MAX;
    let c = view.orig.len();
    let mut partial = vec![FREE; c];
    for i in 0..c {
        if !alive[i] {
            partial[i] = i as u32; // treat peeled vertices as already settled
        }
    }
    fn recurse(view: &CoveredView, alive: &[bool], partial: &mut Vec<u32>) -> Option<Vec<u32>> {
        const FREE: u32 = u32::MAX;
        let u = match (0..partial.len()).find(|&i| partial[i] == FREE) {
            None => {
                // Complete: accept if it differs from M somewhere.
                let differs = (0..partial.len()).any(|i| alive[i] && partial[i] != view.partner[i]);
                return differs.then(|| partial.clone());
            }
            Some(u) => u,
        };
        for &w in &view.adj[u] {
            if alive[w as usize] && partial[w as usize] == FREE {
                partial[u] = w;
                partial[w as usize] = u as u32;
                if let Some(found) = recurse(view, alive, partial) {
                    return Some(found);
                }
                partial[u] = FREE;
                partial[w as usize] = FREE;
            }
        }
        None
    }
    recurse(view, alive, &mut partial)
}

/// Result of [`classify`]: the set of kinds `m` satisfies, or an empty set
/// plus a diagnostic when the input is not a matching at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub kinds: BTreeSet<MatchingKind>,
    pub diagnostic: Option<String>,
}

impl Classification {
    pub fn is_matching(&self) -> bool {
        self.diagnostic.is_none()
    }
}

/// Determine every kind that `m` satisfies in `g`.  A non-matching yields
/// the empty set together with a diagnostic message.
pub fn classify(g: &Graph, m: &Matching) -> Classification {
    if let Err(e) = validate_matching(g, m) {
        return Classification {
            kinds: BTreeSet::new(),
            diagnostic: Some(e.to_string()),
        };
    }
    let mut kinds = BTreeSet::new();
    kinds.insert(MatchingKind::Ordinary);
    let induced = is_induced_matching(g, m).expect("validated");
    let acyclic = is_acyclic_matching(g, m).expect("validated");
    let ur = is_uniquely_restricted(g, m).expect("validated");
    debug_assert!(!induced || acyclic, "induced must imply acyclic");
    debug_assert!(!acyclic || ur, "acyclic must imply uniquely restricted");
    if induced {
        kinds.insert(MatchingKind::Induced);
    }
    if acyclic {
        kinds.insert(MatchingKind::Acyclic);
    }
    if ur {
        kinds.insert(MatchingKind::UniquelyRestricted);
    }
    Classification {
        kinds,
        diagnostic: None,
    }
}

/// Small union-find with union by size.
struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Union the sets of `a` and `b`; false if they were already joined
    /// (i.e. the edge closes a cycle).
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
