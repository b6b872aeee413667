//! Undirected simple graphs, the instance file format, and the
//! polynomial-time graph routines every solver builds on.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;

pub type Vertex = usize;

/// A nonnegative integer or `+inf`.
///
/// Separator numbers and divider numbers are infinite when the two
/// Facilitator agents start together or on adjacent vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended {
    Finite(usize),
    Infinity,
}

impl Extended {
    pub fn finite(self) -> Option<usize> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinity)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => serializer.serialize_u64(*v as u64),
            Extended::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(Extended::Finite(v as usize)),
            Raw::Str(s) if s == "inf" => Ok(Extended::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Immutable undirected simple graph on the vertices `0..n`.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<Vertex>>,
    matrix: Vec<bool>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and
    /// out-of-range endpoints. Edge orientation is irrelevant.
    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, InstanceError> {
        let mut matrix = vec![false; n * n];
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(InstanceError::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(InstanceError::SelfLoop(u));
            }
            if matrix[u * n + v] {
                return Err(InstanceError::DuplicateEdge(u.min(v), u.max(v)));
            }
            matrix[u * n + v] = true;
            matrix[v * n + u] = true;
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, adj, matrix })
    }

    /// Builds a graph from an edge list known to be valid. Panics otherwise.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Self {
        Graph::new(n, edges).expect("invalid edge list")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((n - 1, 0));
        Graph::from_edges(n, &edges)
    }

    /// Complete bipartite graph; the first `a` vertices form one side.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges: Vec<_> = (0..a)
            .flat_map(|u| (a..a + b).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(a + b, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.matrix[u * self.n + v]
    }

    /// `u == v` or `u` adjacent to `v`.
    #[inline]
    pub fn adjacent_or_equal(&self, u: Vertex, v: Vertex) -> bool {
        u == v || self.adjacent(u, v)
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    /// Closed neighborhood, sorted.
    pub fn closed_neighborhood(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = self.adj[v].clone();
        let pos = out.partition_point(|&u| u < v);
        out.insert(pos, v);
        out
    }

    pub fn common_neighbors(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        self.adj[u]
            .iter()
            .copied()
            .filter(|&w| self.adjacent(v, w))
            .collect()
    }

    /// Edge list in canonical `(min, max)` lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        (0..self.n)
            .flat_map(|u| {
                self.adj[u]
                    .iter()
                    .copied()
                    .filter(move |&v| u < v)
                    .map(move |v| (u, v))
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let removed = vec![false; self.n];
        let dist = self.bfs(&removed, 0);
        dist.iter().all(Option::is_some)
    }

    fn bfs(&self, removed: &[bool], source: Vertex) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &w in &self.adj[u] {
                if !removed[w] && dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS distance between `u` and `v` in `G - removed`.
    pub fn distance(&self, removed: &[Vertex], u: Vertex, v: Vertex) -> Extended {
        let mut mask = vec![false; self.n];
        for &r in removed {
            mask[r] = true;
        }
        debug_assert!(!mask[u] && !mask[v], "endpoints must not be removed");
        match self.bfs(&mask, u)[v] {
            Some(d) => Extended::Finite(d),
            None => Extended::Infinity,
        }
    }

    /// The subgraph induced by `vertices`, relabelled `0..vertices.len()`
    /// in the given order.
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        let mut edges = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.adjacent(u, v) {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(vertices.len(), &edges)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[Vertex]) -> Graph {
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(u, v)| (perm[u], perm[v]))
            .collect();
        Graph::from_edges(self.n, &edges)
    }
}

/// Named vertex groups attached to generated instances, e.g.
/// `"clique" -> [2, 3, 4]`.
pub type Layout = BTreeMap<String, Vec<Vertex>>;

/// A game instance: graph, Facilitator start vertices, Divider team size
/// and an optional step bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub s: Vertex,
    pub t: Vertex,
    pub k: usize,
    pub tau: Option<usize>,
    pub layout: Option<Layout>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    s: Vertex,
    t: Vertex,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layout: Option<Layout>,
}

impl Instance {
    /// Validates and assembles an instance.
    pub fn new(
        graph: Graph,
        s: Vertex,
        t: Vertex,
        k: usize,
        tau: Option<usize>,
    ) -> Result<Self, InstanceError> {
        let n = graph.n();
        for v in [s, t] {
            if v >= n {
                return Err(InstanceError::VertexOutOfRange { vertex: v, n });
            }
        }
        if k == 0 {
            return Err(InstanceError::InvalidAgentCount);
        }
        if tau == Some(0) {
            return Err(InstanceError::InvalidTau);
        }
        if !graph.is_connected() {
            return Err(InstanceError::Disconnected);
        }
        Ok(Instance {
            graph,
            s,
            t,
            k,
            tau,
            layout: None,
        })
    }

    pub fn with_layout(mut self, layout: Layout) -> Self {
        self.layout = Some(layout);
        self
    }

    /// Compact canonical JSON: fields in the order `n, edges, s, t, k, tau,
    /// layout`, edges sorted.
    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            n: self.graph.n(),
            edges: self.graph.edges(),
            s: self.s,
            t: self.t,
            k: self.k,
            tau: self.tau,
            layout: self.layout.clone(),
        };
        serde_json::to_string(&raw).expect("instance serialization cannot fail")
    }
}

/// Parses the instance JSON format and validates it.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let raw: RawInstance =
        serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
    let graph = Graph::new(raw.n, &raw.edges)?;
    let mut inst = Instance::new(graph, raw.s, raw.t, raw.k, raw.tau)?;
    inst.layout = raw.layout;
    Ok(inst)
}

/// Graph-only JSON, `{"n": .., "edges": [..]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    s: Option<Vertex>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    t: Option<Vertex>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    k: Option<usize>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    tau: Option<usize>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    layout: Option<Layout>,
}

/// Parses a graph file. Instance files are accepted too; their extra
/// fields are ignored. Disconnected graphs are rejected.
pub fn parse_graph(text: &str) -> Result<Graph, InstanceError> {
    let raw: RawGraph =
        serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
    let g = Graph::new(raw.n, &raw.edges)?;
    if !g.is_connected() {
        return Err(InstanceError::Disconnected);
    }
    Ok(g)
}

pub fn graph_to_json(g: &Graph) -> String {
    let raw = RawGraph {
        n: g.n(),
        edges: g.edges(),
        s: None,
        t: None,
        k: None,
        tau: None,
        layout: None,
    };
    serde_json::to_string(&raw).expect("graph serialization cannot fail")
}

/// Minimum vertex separator between `s` and `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatorResult {
    pub value: Extended,
    pub witness: Vec<Vertex>,
}

/// Unit-capacity flow network with explicit residual arcs.
struct FlowNetwork {
    head: Vec<usize>,
    cap: Vec<i32>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: Vec::new(),
            cap: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i32) {
        self.out[from].push(self.head.len());
        self.head.push(to);
        self.cap.push(cap);
        self.out[to].push(self.head.len());
        self.head.push(from);
        self.cap.push(0);
    }

    /// Residual reachability from `source`.
    fn reachable(&self, source: usize) -> (Vec<bool>, Vec<Option<usize>>) {
        let mut seen = vec![false; self.out.len()];
        let mut via = vec![None; self.out.len()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &arc in &self.out[u] {
                let w = self.head[arc];
                if self.cap[arc] > 0 && !seen[w] {
                    seen[w] = true;
                    via[w] = Some(arc);
                    queue.push_back(w);
                }
            }
        }
        (seen, via)
    }

    /// Augments along shortest paths until none remain, stopping early
    /// once the flow exceeds `limit`.
    fn max_flow(&mut self, source: usize, sink: usize, limit: usize) -> usize {
        let mut flow = 0;
        while flow <= limit {
            let (seen, via) = self.reachable(source);
            if !seen[sink] {
                break;
            }
            let mut v = sink;
            while v != source {
                let arc = via[v].unwrap();
                self.cap[arc] -= 1;
                self.cap[arc ^ 1] += 1;
                v = self.head[arc ^ 1];
            }
            flow += 1;
        }
        flow
    }
}

/// The separator number of `s` and `t`, with a minimum separator.
///
/// Each vertex other than `s` and `t` is split into an in-node and an
/// out-node joined by a unit arc; graph edges become uncapacitated arcs.
/// The witness is the set of split arcs crossing the residual cut.
pub fn lambda(g: &Graph, s: Vertex, t: Vertex) -> SeparatorResult {
    if s == t || g.adjacent(s, t) {
        return SeparatorResult {
            value: Extended::Infinity,
            witness: Vec::new(),
        };
    }
    let n = g.n();
    let big = n as i32 + 1;
    // in-node of v is 2v, out-node is 2v+1
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        let c = if v == s || v == t { big } else { 1 };
        net.add_arc(2 * v, 2 * v + 1, c);
    }
    for (u, v) in g.edges() {
        net.add_arc(2 * u + 1, 2 * v, big);
        net.add_arc(2 * v + 1, 2 * u, big);
    }
    let value = net.max_flow(2 * s + 1, 2 * t, n);
    let (seen, _) = net.reachable(2 * s + 1);
    let witness: Vec<Vertex> = (0..n)
        .filter(|&v| v != s && v != t && seen[2 * v] && !seen[2 * v + 1])
        .collect();
    debug_assert_eq!(witness.len(), value);
    SeparatorResult {
        value: Extended::Finite(value),
        witness,
    }
}

/// Chordality test by lexicographic BFS. On success returns a perfect
/// elimination ordering (each vertex's later neighbors form a clique).
pub fn is_chordal(g: &Graph) -> (bool, Option<Vec<Vertex>>) {
    let order = lex_bfs(g);
    let peo: Vec<Vertex> = order.into_iter().rev().collect();
    if is_perfect_elimination_ordering(g, &peo) {
        (true, Some(peo))
    } else {
        (false, None)
    }
}

/// Lexicographic BFS via partition refinement on an ordered list of
/// classes. Returns vertices in visit order.
pub fn lex_bfs(g: &Graph) -> Vec<Vertex> {
    let n = g.n();
    let mut classes: Vec<Vec<Vertex>> = if n == 0 {
        Vec::new()
    } else {
        vec![(0..n).collect()]
    };
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    while let Some(first) = classes.first_mut() {
        let v = first.remove(0);
        if first.is_empty() {
            classes.remove(0);
        }
        visited[v] = true;
        order.push(v);
        let mut refined = Vec::with_capacity(classes.len() * 2);
        for class in classes.drain(..) {
            let (hit, miss): (Vec<_>, Vec<_>) = class.into_iter().partition(|&u| g.adjacent(u, v));
            if !hit.is_empty() {
                refined.push(hit);
            }
            if !miss.is_empty() {
                refined.push(miss);
            }
        }
        classes = refined;
    }
    debug_assert!(visited.iter().all(|&b| b));
    order
}

pub fn is_perfect_elimination_ordering(g: &Graph, order: &[Vertex]) -> bool {
    let n = g.n();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    for &v in order {
        let later: Vec<Vertex> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| pos[u] > pos[v])
            .collect();
        // Checking the earliest later neighbor suffices (Rose-Tarjan-Lueker).
        if let Some(&parent) = later.iter().min_by_key(|&&u| pos[u]) {
            if later.iter().any(|&u| u != parent && !g.adjacent(u, parent)) {
                return false;
            }
        }
    }
    true
}

/// True iff `g` has no induced path on five vertices. Enumerates induced
/// paths by depth-first extension.
pub fn is_p5_free(g: &Graph) -> bool {
    fn extend(g: &Graph, path: &mut Vec<Vertex>) -> bool {
        if path.len() == 5 {
            return true;
        }
        let last = *path.last().unwrap();
        for &w in g.neighbors(last) {
            if path.contains(&w) {
                continue;
            }
            // w must be adjacent to the last vertex only
            if path[..path.len() - 1].iter().any(|&p| g.adjacent(p, w)) {
                continue;
            }
            path.push(w);
            if extend(g, path) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = Vec::with_capacity(5);
    for v in 0..g.n() {
        path.clear();
        path.push(v);
        if extend(g, &mut path) {
            return false;
        }
    }
    true
}
