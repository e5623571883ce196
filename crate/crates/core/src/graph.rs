//! Finite directed multigraphs with structural predicates and terminating
//! path enumeration.
//!
//! Vertices and edges are identified by name in the input document and by
//! dense indices ([`VertexId`], [`EdgeId`]) internally. Parallel edges and
//! loops are allowed. All iteration orders are deterministic: declaration
//! order for vertices/edges, `(length, lexicographic edge names)` for path
//! and cycle listings.

use std::cmp::Ordering;
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

/// Index of a vertex, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of an edge, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
struct Edge {
    name: String,
    source: VertexId,
    range: VertexId,
}

/// A finite directed multigraph with named vertices and edges.
#[derive(Clone, Debug)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Graph {}

#[derive(Error, Debug)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("invalid name {0:?}: names must match [A-Za-z_][A-Za-z0-9_]*")]
    InvalidName(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("edge {edge:?} references undeclared vertex {vertex:?}")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("edges {0:?} do not form a composable path")]
    NotComposable(Vec<String>),
    #[error("edge sequence {0:?} is not a cycle")]
    NotCycle(Vec<String>),
}

#[derive(Deserialize)]
struct GraphDoc {
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Graph {
    /// Builds a graph from vertex names and `(edge, source, range)` triples,
    /// validating name uniqueness and endpoint declarations.
    pub fn new<S: Into<String>>(
        vertices: Vec<S>,
        edges: Vec<(S, S, S)>,
    ) -> Result<Graph, GraphError> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for v in &vertices {
            if !valid_name(v) {
                return Err(GraphError::InvalidName(v.clone()));
            }
            if !seen.insert(v.clone()) {
                return Err(GraphError::DuplicateName(v.clone()));
            }
        }
        let vertex_id = |name: &str| {
            vertices
                .iter()
                .position(|v| v == name)
                .map(VertexId)
        };
        let mut out_edges = vec![Vec::new(); vertices.len()];
        let mut in_edges = vec![Vec::new(); vertices.len()];
        let mut built = Vec::with_capacity(edges.len());
        for (name, src, rng) in edges {
            let (name, src, rng): (String, String, String) = (name.into(), src.into(), rng.into());
            if !valid_name(&name) {
                return Err(GraphError::InvalidName(name));
            }
            if !seen.insert(name.clone()) {
                return Err(GraphError::DuplicateName(name));
            }
            let source = vertex_id(&src).ok_or_else(|| GraphError::DanglingEndpoint {
                edge: name.clone(),
                vertex: src.clone(),
            })?;
            let range = vertex_id(&rng).ok_or_else(|| GraphError::DanglingEndpoint {
                edge: name.clone(),
                vertex: rng.clone(),
            })?;
            let id = EdgeId(built.len());
            out_edges[source.0].push(id);
            in_edges[range.0].push(id);
            built.push(Edge { name, source, range });
        }
        Ok(Graph {
            vertices,
            edges: built,
            out_edges,
            in_edges,
        })
    }

    /// Parses the JSON graph document
    /// `{"vertices": [...], "edges": [[name, source, range], ...]}`.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        Graph::new(doc.vertices, doc.edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v == name).map(VertexId)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name).map(EdgeId)
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e.0].source
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e.0].range
    }

    /// Outgoing edges of `v` in declaration order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v.0]
    }

    /// Incoming edges of `v` in declaration order.
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v.0]
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out_edges[v.0].is_empty()
    }

    pub fn is_source(&self, v: VertexId) -> bool {
        self.in_edges[v.0].is_empty()
    }

    /// Vertices with no outgoing edges, in declaration order.
    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.is_sink(v)).collect()
    }

    /// Vertices with no incoming edges, in declaration order.
    pub fn sources(&self) -> Vec<VertexId> {
        self.vertex_ids().filter(|&v| self.is_source(v)).collect()
    }

    /// The designated outgoing edge of a non-sink vertex: first of
    /// `s^{-1}(v)` in declaration order.
    pub fn special_edge(&self, v: VertexId) -> Option<EdgeId> {
        self.out_edges[v.0].first().copied()
    }

    /// Same vertices, every edge reversed and renamed with an `_op` suffix.
    pub fn opposite(&self) -> Graph {
        let vertices = self.vertices.clone();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                (
                    format!("{}_op", e.name),
                    self.vertices[e.range.0].clone(),
                    self.vertices[e.source.0].clone(),
                )
            })
            .collect();
        Graph::new(vertices, edges).expect("reversing a valid graph yields a valid graph")
    }

    /// Compares paths by `(length, lexicographic edge names)`.
    pub fn cmp_paths(&self, a: &Path, b: &Path) -> Ordering {
        a.len()
            .cmp(&b.len())
            .then_with(|| {
                for (x, y) in a.edges.iter().zip(&b.edges) {
                    let ord = self.edge_name(*x).cmp(self.edge_name(*y));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
                Ordering::Equal
            })
            .then_with(|| self.vertex_name(a.base).cmp(self.vertex_name(b.base)))
    }

    /// Renders a path as its space-separated edge names, or the vertex name
    /// for a trivial path.
    pub fn path_string(&self, p: &Path) -> String {
        if p.is_trivial() {
            self.vertex_name(p.base).to_string()
        } else {
            p.edges
                .iter()
                .map(|e| self.edge_name(*e))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph({} vertices, {} edges)", self.vertices.len(), self.edges.len())
    }
}

// ---- Paths ----

/// A finite path: a base vertex and a composable edge sequence. A length-0
/// path is the vertex itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    base: VertexId,
    range: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Path {
        Path {
            base: v,
            range: v,
            edges: Vec::new(),
        }
    }

    /// Builds a nonempty path, checking `s(e_{i+1}) = r(e_i)`.
    pub fn from_edges(g: &Graph, edges: Vec<EdgeId>) -> Result<Path, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::NotComposable(Vec::new()));
        }
        for w in edges.windows(2) {
            if g.range(w[0]) != g.source(w[1]) {
                return Err(GraphError::NotComposable(
                    edges.iter().map(|e| g.edge_name(*e).to_string()).collect(),
                ));
            }
        }
        Ok(Path {
            base: g.source(edges[0]),
            range: g.range(*edges.last().unwrap()),
            edges,
        })
    }

    pub fn source(&self) -> VertexId {
        self.base
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn last_edge(&self) -> Option<EdgeId> {
        self.edges.last().copied()
    }

    /// Concatenation `self · other`; `None` unless `r(self) = s(other)`.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.range != other.base {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(Path {
            base: self.base,
            range: other.range,
            edges,
        })
    }

    /// Appends one edge; `None` unless `s(e) = r(self)`.
    pub fn push_edge(&self, g: &Graph, e: EdgeId) -> Option<Path> {
        if g.source(e) != self.range {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.push(e);
        Some(Path {
            base: self.base,
            range: g.range(e),
            edges,
        })
    }

    /// Prepends one edge; `None` unless `r(e) = s(self)`.
    pub fn prepend_edge(&self, g: &Graph, e: EdgeId) -> Option<Path> {
        if g.range(e) != self.base {
            return None;
        }
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        edges.push(e);
        edges.extend_from_slice(&self.edges);
        Some(Path {
            base: g.source(e),
            range: self.range,
            edges,
        })
    }

    /// Drops the last edge. `None` for trivial paths.
    pub fn without_last(&self, g: &Graph) -> Option<Path> {
        let last = *self.edges.last()?;
        let edges = self.edges[..self.edges.len() - 1].to_vec();
        Some(Path {
            base: self.base,
            range: g.source(last),
            edges,
        })
    }

    /// True when `self` starts at the same vertex as `other` and its edge
    /// sequence is a prefix of `other`'s.
    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.base == other.base && other.edges.starts_with(&self.edges)
    }

    /// The remainder of the path after its first `k` edges.
    pub fn suffix_from(&self, g: &Graph, k: usize) -> Path {
        let edges = self.edges[k..].to_vec();
        let base = if k == 0 {
            self.base
        } else {
            g.range(self.edges[k - 1])
        };
        Path {
            base,
            range: self.range,
            edges,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.base == self.range
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges
            .len()
            .cmp(&other.edges.len())
            .then_with(|| self.base.cmp(&other.base))
            .then_with(|| self.edges.cmp(&other.edges))
    }
}

// ---- Cycles ----

/// A closed path with pairwise-distinct edge sources, stored in canonical
/// rotation: the rotation starting at the cycle vertex that is earliest in
/// the graph's declared vertex order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cycle {
    path: Path,
}

impl Cycle {
    /// Validates a closed path and stores it in canonical rotation.
    pub fn from_closed_path(g: &Graph, path: Path) -> Result<Cycle, GraphError> {
        let names = || {
            path.edges
                .iter()
                .map(|e| g.edge_name(*e).to_string())
                .collect::<Vec<_>>()
        };
        if path.is_trivial() || !path.is_closed() {
            return Err(GraphError::NotCycle(names()));
        }
        let sources: Vec<VertexId> = path.edges.iter().map(|e| g.source(*e)).collect();
        let mut dedup = sources.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != sources.len() {
            return Err(GraphError::NotCycle(names()));
        }
        let min_pos = sources
            .iter()
            .enumerate()
            .min_by_key(|(_, v)| **v)
            .map(|(i, _)| i)
            .unwrap();
        let mut edges = path.edges.clone();
        edges.rotate_left(min_pos);
        let rotated = Path::from_edges(g, edges)?;
        Ok(Cycle { path: rotated })
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    /// Base vertex of the canonical rotation.
    pub fn base(&self) -> VertexId {
        self.path.source()
    }

    pub fn edges(&self) -> &[EdgeId] {
        self.path.edges()
    }

    /// The canonical rotation as a closed path.
    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Sources of the cycle edges, in rotation order.
    pub fn vertices(&self, g: &Graph) -> Vec<VertexId> {
        self.path.edges().iter().map(|e| g.source(*e)).collect()
    }

    pub fn contains_vertex(&self, g: &Graph, v: VertexId) -> bool {
        self.position_of_vertex(g, v).is_some()
    }

    pub fn position_of_vertex(&self, g: &Graph, v: VertexId) -> Option<usize> {
        self.path.edges().iter().position(|e| g.source(*e) == v)
    }

    /// The rotation of the cycle starting at position `pos`.
    pub fn rotation_at(&self, g: &Graph, pos: usize) -> Path {
        let mut edges = self.path.edges().to_vec();
        let shift = pos % edges.len();
        edges.rotate_left(shift);
        Path::from_edges(g, edges).expect("rotation of a cycle is a path")
    }
}

// ---- Structural operations ----

/// All cycles of `g`, once each up to rotation, in canonical rotation,
/// sorted by `(length, lexicographic edge names)`.
pub fn enumerate_cycles(g: &Graph) -> Vec<Cycle> {
    let mut cycles = Vec::new();
    for start in g.vertex_ids() {
        // DFS that only visits vertices later than `start` in declaration
        // order, so each cycle is found exactly once at its minimal vertex.
        let mut stack: Vec<(Vec<EdgeId>, VertexId)> = vec![(Vec::new(), start)];
        while let Some((path_edges, at)) = stack.pop() {
            for &e in g.out_edges(at) {
                let to = g.range(e);
                if to == start {
                    let mut edges = path_edges.clone();
                    edges.push(e);
                    let path = Path::from_edges(g, edges).unwrap();
                    cycles.push(Cycle::from_closed_path(g, path).unwrap());
                } else if to > start {
                    // `at` becomes a source once `e` is appended.
                    let blocked =
                        to == at || path_edges.iter().any(|pe| g.source(*pe) == to);
                    if !blocked {
                        let mut edges = path_edges.clone();
                        edges.push(e);
                        stack.push((edges, to));
                    }
                }
            }
        }
    }
    cycles.sort_by(|a, b| g.cmp_paths(a.path(), b.path()));
    cycles
}

/// First exit of the cycle: an edge `e` with `s(e)` on the cycle that is not
/// the cycle edge at that vertex, scanned by cycle position then edge
/// declaration order.
pub fn find_exit(g: &Graph, c: &Cycle) -> Option<(EdgeId, usize)> {
    for (pos, &cycle_edge) in c.edges().iter().enumerate() {
        let v = g.source(cycle_edge);
        for &e in g.out_edges(v) {
            if e != cycle_edge {
                return Some((e, pos));
            }
        }
    }
    None
}

/// True iff no cycle of `g` has an exit.
pub fn is_no_exit(g: &Graph) -> bool {
    exit_witness(g).is_none()
}

/// The first cycle with an exit, with the exit edge and its cycle position.
pub fn exit_witness(g: &Graph) -> Option<(Cycle, EdgeId, usize)> {
    for c in enumerate_cycles(g) {
        if let Some((e, pos)) = find_exit(g, &c) {
            return Some((c, e, pos));
        }
    }
    None
}

/// Edges lying on some cycle.
pub fn cycle_edges(g: &Graph) -> std::collections::BTreeSet<EdgeId> {
    enumerate_cycles(g)
        .iter()
        .flat_map(|c| c.edges().iter().copied())
        .collect()
}

/// Restriction mode for [`paths_ending_at`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    /// All paths using no edge that lies on any cycle (always finite).
    NoCycleEdges,
    /// All paths of length at most the bound.
    AllBounded(usize),
}

/// Paths ending at `v` under the given restriction, sorted by
/// `(length, lexicographic edge names)`.
pub fn paths_ending_at(g: &Graph, v: VertexId, mode: PathMode) -> Vec<Path> {
    let forbidden = match mode {
        PathMode::NoCycleEdges => cycle_edges(g),
        PathMode::AllBounded(_) => Default::default(),
    };
    let bound = match mode {
        PathMode::NoCycleEdges => None,
        PathMode::AllBounded(n) => Some(n),
    };
    let mut result = Vec::new();
    let mut frontier = vec![Path::trivial(v)];
    while let Some(p) = frontier.pop() {
        result.push(p.clone());
        if bound.is_some_and(|n| p.len() >= n) {
            continue;
        }
        for &e in g.in_edges(p.source()) {
            if forbidden.contains(&e) {
                continue;
            }
            frontier.push(p.prepend_edge(g, e).unwrap());
        }
    }
    result.sort_by(|a, b| g.cmp_paths(a, b));
    result
}
