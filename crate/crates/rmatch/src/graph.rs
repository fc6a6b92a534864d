//! Simple undirected graphs on dense vertex indices `0..n-1`.
//!
//! Graphs are immutable once frozen: build them through [`GraphBuilder`],
//! then query.  No self-loops, no parallel edges.  Vertices may carry
//! optional text labels which survive DIMACS round-trips.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Errors for graph construction, queries and text I/O.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    /// Self-loops are rejected at insertion time.
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(u32),
    /// An endpoint or label target does not exist in the graph.
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: u32, n: usize },
    /// `edges_between` requires disjoint vertex sets.
    #[error("vertex sets overlap at vertex {0}")]
    OverlappingSets(u32),
    /// Malformed DIMACS text.
    #[error("graph parse error: {0}")]
    Parse(String),
}

/// A set of vertex indices of some host graph.
///
/// Iteration order is ascending, which keeps every derived artifact
/// (subgraph numbering, edge lists, witnesses) deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexSet(BTreeSet<u32>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(BTreeSet::new())
    }

    pub fn insert(&mut self, v: u32) -> bool {
        self.0.insert(v)
    }

    pub fn contains(&self, v: u32) -> bool {
        self.0.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Ascending iteration over the members.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl From<&[u32]> for VertexSet {
    fn from(slice: &[u32]) -> Self {
        slice.iter().copied().collect()
    }
}

impl<const N: usize> From<[u32; N]> for VertexSet {
    fn from(arr: [u32; N]) -> Self {
        arr.iter().copied().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Builder for [`Graph`].  Edge insertion is idempotent; self-loops and
/// out-of-range endpoints are rejected immediately.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n: usize,
    edges: BTreeSet<(u32, u32)>,
    labels: BTreeMap<u32, String>,
}

impl GraphBuilder {
    /// A builder for a graph on `n` isolated vertices.
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            n,
            edges: BTreeSet::new(),
            labels: BTreeMap::new(),
        }
    }

    fn check_vertex(&self, v: u32) -> Result<(), GraphError> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// Insert the undirected edge `{u, v}`.  Re-inserting an existing edge is
    /// a no-op.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<&mut Self, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        self.edges.insert((u.min(v), u.max(v)));
        Ok(self)
    }

    /// Attach a text label to vertex `v` (replacing any previous label).
    pub fn set_label(&mut self, v: u32, label: impl Into<String>) -> Result<&mut Self, GraphError> {
        self.check_vertex(v)?;
        self.labels.insert(v, label.into());
        Ok(self)
    }

    /// Freeze the builder into an immutable graph.
    pub fn freeze(self) -> Graph {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut labels = vec![None; self.n];
        for (v, s) in self.labels {
            labels[v as usize] = Some(s);
        }
        Graph {
            n: self.n,
            edges: self.edges.into_iter().collect(),
            adj,
            labels,
        }
    }
}

/// An immutable simple undirected graph on vertices `0..n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Sorted list of edges, each stored as `(min, max)`.
    edges: Vec<(u32, u32)>,
    /// Sorted adjacency lists.
    adj: Vec<Vec<u32>>,
    labels: Vec<Option<String>>,
}

/// Result of [`Graph::induced_subgraph`]: the subgraph on its own dense
/// indices together with the map back to the host graph's vertex ids.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[i]` is the host-graph id of subgraph vertex `i`
    /// (ascending, so the numbering is deterministic).
    pub original: Vec<u32>,
}

impl InducedSubgraph {
    /// Host-graph id of subgraph vertex `v`.
    pub fn original_id(&self, v: u32) -> u32 {
        self.original[v as usize]
    }
}

/// Outcome of the bipartiteness test: either a proper 2-coloring or an
/// odd cycle demonstrating non-bipartiteness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bipartition {
    TwoColoring {
        left: VertexSet,
        right: VertexSet,
    },
    /// Vertices of an odd cycle, in order; the closing edge connects the
    /// last vertex back to the first.
    OddCycle(Vec<u32>),
}

impl Bipartition {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Bipartition::TwoColoring { .. })
    }

    /// The two sides when bipartite.
    pub fn sides(&self) -> Option<(&VertexSet, &VertexSet)> {
        match self {
            Bipartition::TwoColoring { left, right } => Some((left, right)),
            Bipartition::OddCycle(_) => None,
        }
    }
}

impl Graph {
    /// Graph with `n` vertices and the given edges; convenience wrapper
    /// around the builder.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.freeze())
    }

    /// Path on `n` vertices: `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    /// Cycle on `n >= 3` vertices: `0-1-...-(n-1)-0`.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
        edges.push((n as u32 - 1, 0));
        Graph::from_edges(n, &edges).expect("cycle edges are valid")
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).expect("complete-graph edges are valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted neighbors of `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Largest vertex degree; `0` for graphs without edges.
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u as usize >= self.n || v as usize >= self.n {
            return false;
        }
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Label of `v`, if any.
    pub fn label(&self, v: u32) -> Option<&str> {
        self.labels[v as usize].as_deref()
    }

    fn check_vertex(&self, v: u32) -> Result<(), GraphError> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        }
    }

    /// Adjacency rows as 64-bit masks, available for graphs on at most 64
    /// vertices.  Internal fast path for the solvers and classifiers.
    pub(crate) fn adjacency_masks(&self) -> Option<Vec<u64>> {
        if self.n > 64 {
            return None;
        }
        let mut rows = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            rows[u as usize] |= 1 << v;
            rows[v as usize] |= 1 << u;
        }
        Some(rows)
    }

    /// The subgraph induced by `set`, renumbered to dense indices in
    /// ascending order of original id.  Labels are carried over.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<InducedSubgraph, GraphError> {
        for v in set.iter() {
            self.check_vertex(v)?;
        }
        let original: Vec<u32> = set.iter().collect();
        let index: BTreeMap<u32, u32> = original
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let mut b = GraphBuilder::new(original.len());
        for (i, &v) in original.iter().enumerate() {
            if let Some(label) = self.label(v) {
                b.set_label(i as u32, label).expect("index in range");
            }
            for &w in self.neighbors(v) {
                if let Some(&j) = index.get(&w) {
                    b.add_edge(i as u32, j).expect("endpoints in range");
                }
            }
        }
        Ok(InducedSubgraph {
            graph: b.freeze(),
            original,
        })
    }

    /// Edges with one endpoint in `x` and the other in `y`, reported as
    /// `(x-side, y-side)` pairs in ascending order.  The sets must be
    /// disjoint.
    pub fn edges_between(
        &self,
        x: &VertexSet,
        y: &VertexSet,
    ) -> Result<Vec<(u32, u32)>, GraphError> {
        for v in x.iter().chain(y.iter()) {
            self.check_vertex(v)?;
        }
        if let Some(v) = x.iter().find(|&v| y.contains(v)) {
            return Err(GraphError::OverlappingSets(v));
        }
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if x.contains(a) && y.contains(b) {
                out.push((a, b));
            } else if x.contains(b) && y.contains(a) {
                out.push((b, a));
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// BFS 2-coloring.  Returns the two color classes, or an odd cycle if
    /// none exists.  The empty graph is bipartite with two empty sides.
    pub fn is_bipartite(&self) -> Bipartition {
        const WHITE: i8 = -1;
        let mut color = vec![WHITE; self.n];
        let mut parent = vec![u32::MAX; self.n];
        let mut depth = vec![0u32; self.n];
        let mut queue = std::collections::VecDeque::new();

        for start in 0..self.n as u32 {
            if color[start as usize] != WHITE {
                continue;
            }
            color[start as usize] = 0;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if color[v as usize] == WHITE {
                        color[v as usize] = 1 - color[u as usize];
                        parent[v as usize] = u;
                        depth[v as usize] = depth[u as usize] + 1;
                        queue.push_back(v);
                    } else if color[v as usize] == color[u as usize] {
                        return Bipartition::OddCycle(odd_cycle_from(u, v, &parent, &depth));
                    }
                }
            }
        }
        let left: VertexSet = (0..self.n as u32)
            .filter(|&v| color[v as usize] == 0)
            .collect();
        let right: VertexSet = (0..self.n as u32)
            .filter(|&v| color[v as usize] == 1)
            .collect();
        Bipartition::TwoColoring { left, right }
    }

    /// Serialize in DIMACS edge format with 1-based vertex ids.  Labels are
    /// emitted as `c label <v> <text>` comment lines.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p edge {} {}\n", self.n, self.edges.len()));
        for (v, label) in self.labels.iter().enumerate() {
            if let Some(s) = label {
                out.push_str(&format!("c label {} {}\n", v + 1, s));
            }
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Parse DIMACS edge format: one `p edge <n> <m>` header, `e <u> <v>`
    /// lines with 1-based endpoints, `c label <v> <text>` comments for
    /// labels, any other `c` lines ignored.  The header's edge count must
    /// match the number of `e` lines.
    pub fn from_dimacs(text: &str) -> Result<Graph, GraphError> {
        let mut builder: Option<GraphBuilder> = None;
        let mut declared_edges: usize = 0;
        let mut seen_edges: usize = 0;
        let mut pending_labels: Vec<(u32, String)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: String| GraphError::Parse(format!("line {}: {}", lineno + 1, msg));
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            match tokens.next() {
                Some("c") => {
                    let rest: Vec<&str> = tokens.collect();
                    if rest.first() == Some(&"label") {
                        if rest.len() < 3 {
                            return Err(err("label comment needs a vertex and text".into()));
                        }
                        let v: u32 = rest[1]
                            .parse()
                            .map_err(|_| err(format!("bad label vertex '{}'", rest[1])))?;
                        if v == 0 {
                            return Err(err("vertex ids are 1-based".into()));
                        }
                        pending_labels.push((v - 1, rest[2..].join(" ")));
                    }
                }
                Some("p") => {
                    if builder.is_some() {
                        return Err(err("duplicate problem line".into()));
                    }
                    if tokens.next() != Some("edge") {
                        return Err(err("expected 'p edge <n> <m>'".into()));
                    }
                    let n: usize = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("bad vertex count".into()))?;
                    declared_edges = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("bad edge count".into()))?;
                    if tokens.next().is_some() {
                        return Err(err("trailing tokens after problem line".into()));
                    }
                    builder = Some(GraphBuilder::new(n));
                }
                Some("e") => {
                    let b = builder
                        .as_mut()
                        .ok_or_else(|| err("edge before problem line".into()))?;
                    let u: u32 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("bad edge endpoint".into()))?;
                    let v: u32 = tokens
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("bad edge endpoint".into()))?;
                    if tokens.next().is_some() {
                        return Err(err("trailing tokens after edge".into()));
                    }
                    if u == 0 || v == 0 {
                        return Err(err("vertex ids are 1-based".into()));
                    }
                    b.add_edge(u - 1, v - 1).map_err(|e| err(e.to_string()))?;
                    seen_edges += 1;
                }
                Some(other) => {
                    return Err(err(format!("unrecognized line type '{other}'")));
                }
                None => unreachable!("empty lines are skipped"),
            }
        }

        let mut b = builder.ok_or_else(|| GraphError::Parse("missing problem line".into()))?;
        if seen_edges != declared_edges {
            return Err(GraphError::Parse(format!(
                "header declares {declared_edges} edges but {seen_edges} were listed"
            )));
        }
        for (v, s) in pending_labels {
            b.set_label(v, s)
                .map_err(|e| GraphError::Parse(e.to_string()))?;
        }
        Ok(b.freeze())
    }
}

/// Reconstruct the odd cycle closed by the non-tree edge `{u, v}` whose
/// endpoints received the same BFS color in the same tree.
fn odd_cycle_from(u: u32, v: u32, parent: &[u32], depth: &[u32]) -> Vec<u32> {
    let mut up_u = vec![u];
    let mut up_v = vec![v];
    let (mut a, mut b) = (u, v);
    while depth[a as usize] > depth[b as usize] {
        a = parent[a as usize];
        up_u.push(a);
    }
    while depth[b as usize] > depth[a as usize] {
        b = parent[b as usize];
        up_v.push(b);
    }
    while a != b {
        a = parent[a as usize];
        b = parent[b as usize];
        up_u.push(a);
        up_v.push(b);
    }
    // up_u ends at the meeting vertex; up_v ends there too — drop the
    // duplicate and splice the v-side in reverse to close the cycle.
    up_v.pop();
    up_v.reverse();
    up_u.extend(up_v);
    up_u
}
