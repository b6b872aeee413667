//! Rendezvous in bounded time on graphs of small neighborhood diversity:
//! decompose into clique and independent modules, enumerate module-level
//! Facilitator trajectories, and decide each candidate Divider strategy by
//! integer feasibility.

mod candidates;
pub mod ilp;
mod model;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::SolveError;
use crate::graph::{Graph, Vertex};

pub use candidates::{
    enumerate_candidates, node_options, CandidateNode, CandidateStrategy, Cursor, Next, Visitor,
};
pub use ilp::{ilp_feasible, ilp_feasible_with, Cmp, Constraint, IlpSystem};
pub use model::build_ilp;

/// Default cap on examined candidates.
pub const DEFAULT_CANDIDATE_BUDGET: u64 = 10_000_000;
/// Default cap on move-tree nodes.
pub const DEFAULT_TREE_BUDGET: usize = 1_000_000;
/// Default cap on solver work per system.
pub const DEFAULT_ILP_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuleKind {
    Clique,
    Independent,
}

/// Partition of the vertices into clique and independent modules with
/// uniform adjacency between modules, and the quotient graph on module
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdDecomposition {
    pub modules: Vec<Vec<Vertex>>,
    pub kinds: Vec<ModuleKind>,
    pub quotient: Graph,
    /// Module index of every vertex.
    pub id: Vec<usize>,
}

impl NdDecomposition {
    /// Number of modules.
    pub fn ell(&self) -> usize {
        self.modules.len()
    }

    pub fn size(&self, i: usize) -> usize {
        self.modules[i].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.modules.iter().map(Vec::len).collect()
    }
}

/// Minimum neighborhood decomposition: `u ~ v` iff
/// `N(u) - {v} = N(v) - {u}`. Singleton modules are reported as cliques.
pub fn neighborhood_decomposition(g: &Graph) -> NdDecomposition {
    let n = g.n();
    let twins = |u: Vertex, v: Vertex| {
        let a = g.neighbors(u).iter().filter(|&&w| w != v);
        let b = g.neighbors(v).iter().filter(|&&w| w != u);
        a.eq(b)
    };
    let mut id = vec![usize::MAX; n];
    let mut modules: Vec<Vec<Vertex>> = Vec::new();
    for (v, slot) in id.iter_mut().enumerate() {
        let i = modules
            .iter()
            .position(|m| twins(m[0], v))
            .unwrap_or_else(|| {
                modules.push(Vec::new());
                modules.len() - 1
            });
        *slot = i;
        modules[i].push(v);
    }
    let kinds = modules
        .iter()
        .map(|m| {
            if m.len() == 1 || g.adjacent(m[0], m[1]) {
                ModuleKind::Clique
            } else {
                ModuleKind::Independent
            }
        })
        .collect();
    let ell = modules.len();
    let mut qedges = Vec::new();
    for i in 0..ell {
        for j in i + 1..ell {
            if g.adjacent(modules[i][0], modules[j][0]) {
                qedges.push((i, j));
            }
        }
    }
    NdDecomposition {
        modules,
        kinds,
        quotient: Graph::from_edges(ell, &qedges),
        id,
    }
}

/// Builds a graph from module specifications: module `i` has `sizes[i]`
/// vertices forming a clique or independent set, and modules adjacent in
/// `quotient` are completely joined. Vertices are numbered module by module.
pub fn blow_up(sizes: &[usize], kinds: &[ModuleKind], quotient: &[(usize, usize)]) -> Graph {
    let mut start = vec![0; sizes.len() + 1];
    for i in 0..sizes.len() {
        start[i + 1] = start[i] + sizes[i];
    }
    let mut edges = Vec::new();
    for i in 0..sizes.len() {
        if kinds[i] == ModuleKind::Clique {
            for u in start[i]..start[i + 1] {
                for v in u + 1..start[i + 1] {
                    edges.push((u, v));
                }
            }
        }
    }
    for &(i, j) in quotient {
        for u in start[i]..start[i + 1] {
            for v in start[j]..start[j + 1] {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(start[sizes.len()], &edges)
}

/// Unordered module pair, stored sorted.
pub type Label = (usize, usize);

fn label(p: usize, q: usize) -> Label {
    (p.min(q), p.max(q))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveNode {
    pub label: Label,
    pub depth: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// All module-level Facilitator trajectories of a fixed length: the
/// children of `{p, q}` are the pairs `{p', q'}` with `p'` in the closed
/// quotient neighborhood of `p` and `q'` in that of `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveTree {
    pub nodes: Vec<MoveNode>,
    pub tau: usize,
}

impl MoveTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.nodes[v].depth == self.tau
    }
}

/// Closed-neighborhood children of a label in canonical order.
pub fn label_children(quotient: &Graph, (p, q): Label) -> Vec<Label> {
    let mut out: Vec<Label> = quotient
        .closed_neighborhood(p)
        .into_iter()
        .flat_map(|a| {
            quotient
                .closed_neighborhood(q)
                .into_iter()
                .map(move |b| label(a, b))
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn build_move_tree(
    nd: &NdDecomposition,
    s: Vertex,
    t: Vertex,
    tau: usize,
) -> Result<MoveTree, SolveError> {
    build_move_tree_with(nd, s, t, tau, DEFAULT_TREE_BUDGET)
}

pub fn build_move_tree_with(
    nd: &NdDecomposition,
    s: Vertex,
    t: Vertex,
    tau: usize,
    budget: usize,
) -> Result<MoveTree, SolveError> {
    if nd.id[s] == nd.id[t] {
        return Err(SolveError::Contract(
            "s and t lie in the same module".into(),
        ));
    }
    let mut nodes = vec![MoveNode {
        label: label(nd.id[s], nd.id[t]),
        depth: 0,
        parent: None,
        children: Vec::new(),
    }];
    let mut frontier = vec![0];
    for depth in 1..=tau {
        let mut next = Vec::new();
        for v in frontier {
            for l in label_children(&nd.quotient, nodes[v].label) {
                if nodes.len() >= budget {
                    return Err(SolveError::BudgetExceeded {
                        stage: "move-tree",
                        estimate: nodes.len() as u128 + 1,
                        budget: budget as u128,
                    });
                }
                let id = nodes.len();
                nodes.push(MoveNode {
                    label: l,
                    depth,
                    parent: Some(v),
                    children: Vec::new(),
                });
                nodes[v].children.push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    Ok(MoveTree { nodes, tau })
}

/// Budgets for the three stages of the algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NdConfig {
    pub tree_budget: usize,
    pub candidate_budget: u64,
    pub ilp_budget: u64,
}

impl Default for NdConfig {
    fn default() -> Self {
        NdConfig {
            tree_budget: DEFAULT_TREE_BUDGET,
            candidate_budget: DEFAULT_CANDIDATE_BUDGET,
            ilp_budget: DEFAULT_ILP_BUDGET,
        }
    }
}

/// How a decision was reached, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NdReport {
    pub divider_wins: bool,
    /// `trivial` for the special cases, `same-module`, or `candidates`.
    pub path: &'static str,
    pub modules: usize,
    pub tree_nodes: usize,
    pub candidates_examined: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CandidateStrategy>,
}

impl fmt::Display for NdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "divider_wins={} path={} modules={} tree_nodes={} candidates={}",
            self.divider_wins, self.path, self.modules, self.tree_nodes, self.candidates_examined
        )
    }
}

/// Whether Divider with `k` agents keeps the pair apart for `tau` moves.
pub fn divider_wins_in_time_nd(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    k: usize,
    tau: usize,
) -> Result<bool, SolveError> {
    Ok(divider_wins_in_time_nd_report(g, s, t, k, tau, &NdConfig::default())?.divider_wins)
}

/// As [`divider_wins_in_time_nd`], also returning the number of
/// candidates examined and the first feasible candidate found.
pub fn divider_wins_in_time_nd_report(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    k: usize,
    tau: usize,
    cfg: &NdConfig,
) -> Result<NdReport, SolveError> {
    let nd = neighborhood_decomposition(g);
    let report = |divider_wins, path, tree_nodes, candidates_examined, witness| NdReport {
        divider_wins,
        path,
        modules: nd.ell(),
        tree_nodes,
        candidates_examined,
        witness,
    };
    if s == t || tau == 0 || g.adjacent(s, t) {
        return Ok(report(s != t && tau == 0, "trivial", 0, 0, None));
    }
    if nd.id[s] == nd.id[t] {
        let wins = k >= g.common_neighbors(s, t).len();
        return Ok(report(wins, "same-module", 0, 0, None));
    }
    let tree = build_move_tree_with(&nd, s, t, tau, cfg.tree_budget)?;
    let sizes = nd.sizes();
    let options = node_options(&tree, &nd, k);
    let examined = AtomicU64::new(0);
    let failure: Mutex<Option<SolveError>> = Mutex::new(None);
    let refuted = |cand: &CandidateStrategy| {
        let sys = build_ilp(cand, &nd.quotient, &nd.kinds, &sizes, k);
        ilp_feasible_with(&sys, cfg.ilp_budget).map(|feasible| !feasible)
    };
    let witness = candidates::root_choices(&options)
        .into_par_iter()
        .find_map_any(|root_choice| {
            let mut search = Search {
                refuted: &refuted,
                examined: &examined,
                failure: &failure,
                budget: cfg.candidate_budget,
                paths: HashMap::new(),
                found: None,
            };
            let _ = candidates::for_each_candidate_from(&tree, &options, root_choice, &mut search);
            search.found
        });
    if let Some(e) = failure.into_inner().unwrap() {
        if witness.is_none() {
            return Err(e);
        }
    }
    let count = examined.load(Ordering::Relaxed).min(cfg.candidate_budget);
    Ok(report(
        witness.is_some(),
        "candidates",
        tree.len(),
        count,
        witness,
    ))
}

type Refuter<'a> = dyn Fn(&CandidateStrategy) -> Result<bool, SolveError> + Sync + 'a;

/// Candidate search over one part of the space. Branches are checked on
/// their own first, memoized per branch: most refutations already show on
/// a single root-to-node branch.
struct Search<'a> {
    refuted: &'a Refuter<'a>,
    examined: &'a AtomicU64,
    failure: &'a Mutex<Option<SolveError>>,
    budget: u64,
    paths: HashMap<Vec<usize>, bool>,
    found: Option<CandidateStrategy>,
}

impl Search<'_> {
    fn fail(&self, e: SolveError) -> Next {
        *self.failure.lock().unwrap() = Some(e);
        Next::Stop
    }
}

impl Visitor for Search<'_> {
    fn keep(&mut self, cur: &Cursor, v: usize, o: usize) -> bool {
        let key = cur.path_key(v, o);
        if let Some(&ok) = self.paths.get(&key) {
            return ok;
        }
        // a branch whose check runs out of budget is kept
        let ok = !(self.refuted)(&cur.path(v, o)).unwrap_or(false);
        self.paths.insert(key, ok);
        ok
    }

    fn visit(&mut self, cur: &Cursor) -> Next {
        if self.failure.lock().unwrap().is_some() {
            return Next::Stop;
        }
        if self.examined.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return self.fail(SolveError::BudgetExceeded {
                stage: "candidates",
                estimate: self.budget as u128 + 1,
                budget: self.budget as u128,
            });
        }
        let cand = cur.candidate();
        match (self.refuted)(&cand) {
            Ok(false) => {
                self.found = Some(cand);
                Next::Stop
            }
            Ok(true) => Next::Skip(shortest_refuted_prefix(cur, self.refuted)),
            Err(e) => self.fail(e),
        }
    }
}

/// Length of the shortest refuted prefix of a refuted candidate, found by
/// galloping then bisection. Adding nodes only adds constraints, so every
/// extension of a refuted prefix is refuted. A prefix whose check runs out
/// of budget counts as not refuted.
fn shortest_refuted_prefix(cur: &Cursor, refuted: &Refuter) -> usize {
    let m = cur.choices();
    let is_refuted = |len: usize| len == m || refuted(&cur.prefix(len)).unwrap_or(false);
    let (mut lo, mut hi) = (1, m);
    let mut len = 1;
    while len < m {
        if is_refuted(len) {
            hi = len;
            break;
        }
        lo = len + 1;
        len *= 2;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if is_refuted(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    hi
}
