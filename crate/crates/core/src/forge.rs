//! Instance generators: the two spider families with a large gap between
//! separator and divider numbers, the Set Cover and QBF reduction graphs,
//! brute-force oracles for the source problems, and seeded random graphs.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ForgeError;
use crate::graph::{Graph, Instance, Layout, Vertex};

/// Incremental graph construction with named vertex groups.
struct Builder {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    layout: Layout,
}

impl Builder {
    fn new() -> Self {
        Builder {
            n: 0,
            edges: Vec::new(),
            layout: Layout::new(),
        }
    }

    fn vertex(&mut self, group: &str) -> Vertex {
        let v = self.n;
        self.n += 1;
        self.layout.entry(group.to_string()).or_default().push(v);
        v
    }

    fn block(&mut self, group: &str, count: usize) -> Vec<Vertex> {
        self.layout.entry(group.to_string()).or_default();
        (0..count).map(|_| self.vertex(group)).collect()
    }

    fn edge(&mut self, u: Vertex, v: Vertex) {
        self.edges.push((u.min(v), u.max(v)));
    }

    /// Joins `from` and `to` by a fresh path with `length` edges; the whole
    /// path, endpoints included, is recorded under `name`.
    fn path(&mut self, name: &str, from: Vertex, to: Vertex, length: usize) {
        assert!(length >= 1);
        let mut seq = vec![from];
        for _ in 1..length {
            let v = self.n;
            self.n += 1;
            seq.push(v);
        }
        seq.push(to);
        for w in seq.windows(2) {
            self.edge(w[0], w[1]);
        }
        self.layout.insert(name.to_string(), seq);
    }

    fn finish(mut self, s: Vertex, t: Vertex, k: usize, tau: Option<usize>) -> Instance {
        self.edges.sort_unstable();
        self.edges.dedup();
        let g = Graph::new(self.n, &self.edges).expect("generator produced an invalid graph");
        Instance::new(g, s, t, k, tau)
            .expect("generator produced an invalid instance")
            .with_layout(self.layout)
    }
}

/// Clique `u_1..u_p` with paths `s x_i u_i` and `t y_i u_i`. Layout: `s = 0`,
/// `t = 1`, then the blocks `u`, `x`, `y` of `p` vertices each. The
/// instance carries `k = 2`, the divider number of the family.
pub fn clique_spider(p: usize) -> Result<Instance, ForgeError> {
    if p < 2 {
        return Err(ForgeError::Invalid {
            what: "clique-spider",
            reason: format!("p = {p} < 2"),
        });
    }
    let mut b = Builder::new();
    let s = b.vertex("s");
    let t = b.vertex("t");
    let u = b.block("u", p);
    let x = b.block("x", p);
    let y = b.block("y", p);
    for i in 0..p {
        for j in i + 1..p {
            b.edge(u[i], u[j]);
        }
        b.edge(s, x[i]);
        b.edge(x[i], u[i]);
        b.edge(t, y[i]);
        b.edge(y[i], u[i]);
    }
    Ok(b.finish(s, t, 2, None))
}

/// Path `u_1..u_p` with every `u_i` joined to `s` and to `t` by paths of
/// length `p/2 + 1`. Layout: `s = 0`, `t = 1`, block `u`, then paths
/// `P1..Pp` (from `s`) and `Pprime1..Pprimep` (from `t`).
pub fn path_spider(p: usize) -> Result<Instance, ForgeError> {
    if p < 2 {
        return Err(ForgeError::Invalid {
            what: "path-spider",
            reason: format!("p = {p} < 2"),
        });
    }
    let h = p / 2 + 1;
    let mut b = Builder::new();
    let s = b.vertex("s");
    let t = b.vertex("t");
    let u = b.block("u", p);
    for w in u.windows(2) {
        b.edge(w[0], w[1]);
    }
    for (i, &ui) in u.iter().enumerate() {
        b.path(&format!("P{}", i + 1), s, ui, h);
    }
    for (i, &ui) in u.iter().enumerate() {
        b.path(&format!("Pprime{}", i + 1), t, ui, h);
    }
    Ok(b.finish(s, t, 2, None))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetCoverInstance {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
    pub k: usize,
}

impl SetCoverInstance {
    pub fn validate(&self) -> Result<(), ForgeError> {
        let bad = |reason: String| {
            Err(ForgeError::Invalid {
                what: "set cover",
                reason,
            })
        };
        if self.n == 0 {
            return bad("empty universe".into());
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        for (j, set) in self.sets.iter().enumerate() {
            if set.is_empty() {
                return bad(format!("set {j} is empty"));
            }
            if let Some(&e) = set.iter().find(|&&e| e >= self.n) {
                return bad(format!("set {j} contains {e} outside the universe"));
            }
        }
        Ok(())
    }
}

/// Whether at most `k` of the sets cover the universe, by subset enumeration.
pub fn solve_set_cover_brute(sc: &SetCoverInstance) -> Result<bool, ForgeError> {
    sc.validate()?;
    let m = sc.sets.len();
    if m > 20 {
        return Err(ForgeError::SizeLimit {
            what: "set family",
            size: m,
            limit: 20,
        });
    }
    if sc.n > 128 {
        return Err(ForgeError::SizeLimit {
            what: "universe",
            size: sc.n,
            limit: 128,
        });
    }
    let full: u128 = if sc.n == 128 {
        u128::MAX
    } else {
        (1u128 << sc.n) - 1
    };
    let masks: Vec<u128> = sc
        .sets
        .iter()
        .map(|set| set.iter().fold(0, |acc, &e| acc | 1 << e))
        .collect();
    Ok((0u32..1 << m)
        .filter(|sel| sel.count_ones() as usize <= sc.k)
        .any(|sel| {
            let covered = (0..m)
                .filter(|j| sel >> j & 1 == 1)
                .fold(0, |acc, j| acc | masks[j]);
            covered == full
        }))
}

/// The Set Cover reduction graph with `k + 1` Divider agents and the
/// two-move horizon attached as `tau`. Layout: `s = 0`, `t = 1`, `z = 2`,
/// block `u` (universe), blocks `S1..Sk` (copies of the family), then `w`,
/// `x`, `xprime`, `y`, `yprime`.
pub fn reduce_set_cover(sc: &SetCoverInstance) -> Result<Instance, ForgeError> {
    sc.validate()?;
    let (n, m, k) = (sc.n, sc.sets.len(), sc.k);
    let mut b = Builder::new();
    let s = b.vertex("s");
    let t = b.vertex("t");
    let z = b.vertex("z");
    let u = b.block("u", n);
    let copies: Vec<Vec<Vertex>> = (1..=k).map(|i| b.block(&format!("S{i}"), m)).collect();
    let w = b.block("w", k);
    let x = b.block("x", n);
    let xp = b.block("xprime", n);
    let y = b.block("y", k);
    let yp = b.block("yprime", k);
    for copy in &copies {
        for (j, set) in sc.sets.iter().enumerate() {
            for &e in set {
                b.edge(copy[j], u[e]);
            }
        }
    }
    for i in 0..k {
        for &sv in &copies[i] {
            b.edge(w[i], sv);
        }
        b.edge(s, y[i]);
        b.edge(y[i], w[i]);
        b.edge(w[i], yp[i]);
        b.edge(yp[i], t);
    }
    for h in 0..n {
        b.edge(s, x[h]);
        b.edge(x[h], u[h]);
        b.edge(u[h], xp[h]);
        b.edge(xp[h], t);
    }
    b.edge(z, s);
    b.edge(z, t);
    Ok(b.finish(s, t, k + 1, Some(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub neg: bool,
}

/// `forall x1 exists x2 ... forall x(2n-1) exists x(2n)` over a CNF matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QbfFormula {
    pub n: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl QbfFormula {
    pub fn validate(&self) -> Result<(), ForgeError> {
        let bad = |reason: String| {
            Err(ForgeError::Invalid {
                what: "QBF formula",
                reason,
            })
        };
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        for (j, clause) in self.clauses.iter().enumerate() {
            if clause.is_empty() {
                return bad(format!("clause {j} is empty"));
            }
            if let Some(l) = clause.iter().find(|l| l.var == 0 || l.var > 2 * self.n) {
                return bad(format!(
                    "clause {j} references variable {} outside 1..={}",
                    l.var,
                    2 * self.n
                ));
            }
        }
        Ok(())
    }

    fn satisfied_by(&self, assignment: u32) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|l| (assignment >> (l.var - 1) & 1 == 1) != l.neg)
        })
    }
}

/// Evaluates the alternating formula by exhaustive game-tree search.
pub fn evaluate_qbf_brute(phi: &QbfFormula) -> Result<bool, ForgeError> {
    phi.validate()?;
    if 2 * phi.n > 16 {
        return Err(ForgeError::SizeLimit {
            what: "QBF variable count",
            size: 2 * phi.n,
            limit: 16,
        });
    }
    fn eval(phi: &QbfFormula, var: usize, assignment: u32) -> bool {
        if var > 2 * phi.n {
            return phi.satisfied_by(assignment);
        }
        let mut branches = [false, true]
            .into_iter()
            .map(|val| eval(phi, var + 1, assignment | (val as u32) << (var - 1)));
        if var % 2 == 1 {
            branches.all(|b| b)
        } else {
            branches.any(|b| b)
        }
    }
    Ok(eval(phi, 1, 0))
}

/// Horizon of the bounded QBF reduction.
pub fn qbf_tau(n: usize) -> usize {
    2 * n + 3
}

/// Divider team size of the bounded QBF reduction.
pub fn qbf_k(n: usize) -> usize {
    2 * n + 2
}

/// Length of `P_i` and `Pbar_i`, `i` in `1..=2n`.
pub fn qbf_p_length(n: usize, i: usize) -> usize {
    2 * (n - i.div_ceil(2)) + 1
}

/// Length of `Q_(2i-1)` and `Qbar_(2i-1)`, `i` in `1..=n`.
pub fn qbf_q_length(n: usize, i: usize) -> usize {
    4 * (n - i) + 5
}

/// Length of `R_i`, `i` in `1..=2n`: both `R_(2j-1)` and `R_(2j)` have length `2j - 1`.
pub fn qbf_r_length(i: usize) -> usize {
    2 * i.div_ceil(2) - 1
}

fn qbf_graph(phi: &QbfFormula) -> (Builder, Vertex, Vertex) {
    let (n, m) = (phi.n, phi.clauses.len());
    let mut b = Builder::new();
    let s = b.vertex("s");
    let t = b.vertex("t");
    let z = b.vertex("z");
    let zp = b.vertex("zprime");
    let c = b.block("c", m);
    let u = b.block("u", n + 1);
    let v = b.block("v", 2 * n + 1);
    let w = b.block("w", m);
    let wp = b.block("wprime", m);
    // spine vertices between u_(i-1) and u_i, i = 1..n
    let xs = b.block("xprime", n);
    let xbs = b.block("xbarprime", n);
    let x = b.block("x", 2 * n);
    let xb = b.block("xbar", 2 * n);
    let x2 = b.block("x2prime", 2 * n);
    let xb2 = b.block("xbar2prime", 2 * n);
    let y = b.block("y", 2 * n);
    let yp = b.block("yprime", 2 * n);

    b.edge(s, u[0]);
    for i in 1..=n {
        for sp in [xs[i - 1], xbs[i - 1]] {
            b.edge(sp, u[i - 1]);
            b.edge(sp, u[i]);
        }
        b.edge(xs[i - 1], x[2 * i - 2]);
        b.edge(xbs[i - 1], xb[2 * i - 2]);
    }
    b.edge(t, v[0]);
    for i in 1..=2 * n {
        b.edge(v[i - 1], v[i]);
    }
    for j in 0..m {
        b.edge(u[n], w[j]);
        b.edge(w[j], c[j]);
        b.edge(v[2 * n], wp[j]);
        b.edge(wp[j], c[j]);
    }
    for zz in [z, zp] {
        b.edge(zz, s);
        b.edge(zz, t);
    }
    for i in 1..=2 * n {
        b.edge(y[i - 1], x[i - 1]);
        b.edge(y[i - 1], xb[i - 1]);
        b.edge(yp[i - 1], s);
        b.edge(yp[i - 1], t);
        b.path(&format!("P{i}"), x[i - 1], x2[i - 1], qbf_p_length(n, i));
        b.path(
            &format!("Pbar{i}"),
            xb[i - 1],
            xb2[i - 1],
            qbf_p_length(n, i),
        );
        b.path(&format!("R{i}"), y[i - 1], yp[i - 1], qbf_r_length(i));
    }
    for i in 1..=n {
        let odd = 2 * i - 1;
        b.path(&format!("Q{odd}"), x[odd - 1], v[odd], qbf_q_length(n, i));
        b.path(
            &format!("Qbar{odd}"),
            xb[odd - 1],
            v[odd],
            qbf_q_length(n, i),
        );
    }
    for (j, clause) in phi.clauses.iter().enumerate() {
        for l in clause {
            let end = if l.neg { xb2[l.var - 1] } else { x2[l.var - 1] };
            b.edge(end, c[j]);
        }
    }
    (b, s, t)
}

/// The bounded QBF reduction: Divider with `2n + 2` agents survives
/// `2n + 3` moves iff the formula is true.
///
/// Literal-gadget vertices are `x`, `xbar` (adjacent to `y`) with pendant
/// path ends `x2prime`, `xbar2prime`; the spine vertices between
/// consecutive `u` are `xprime`, `xbarprime`, each adjacent to the gadget
/// vertex of the same odd variable. `x2prime[i]` (`xbar2prime[i]`) is
/// adjacent to `c[j]` when the literal occurs in clause `j`. Paths are
/// recorded under `P{i}`, `Pbar{i}`, `Q{i}`, `Qbar{i}`, `R{i}`.
pub fn reduce_qbf(phi: &QbfFormula) -> Result<Instance, ForgeError> {
    phi.validate()?;
    let (b, s, t) = qbf_graph(phi);
    Ok(b.finish(s, t, qbf_k(phi.n), Some(qbf_tau(phi.n))))
}

/// Size of the guard set added by the unbounded reduction.
pub fn qbf_guard_count(n: usize, m: usize) -> usize {
    (n + 1) + 4 * n + (2 * n + 1) + m
}

/// The unbounded QBF reduction: the bounded graph plus guard vertices
/// adjacent to `s` and `t`, each joined back into the graph by a path.
/// Guards are recorded under `Y` and by kind (`uguard`, `a`, `abar`,
/// `aprime`, `abarprime`, `vguard`, `cguard`); paths under `L{i}`, `S{i}`,
/// `Sbar{i}`, `Sprime{i}`, `Sbarprime{i}`, `Lprime{i}`, `F{j}`.
pub fn reduce_qbf_unbounded(phi: &QbfFormula) -> Result<Instance, ForgeError> {
    phi.validate()?;
    let (n, m) = (phi.n, phi.clauses.len());
    let (mut b, s, t) = qbf_graph(phi);
    let get = |b: &Builder, name: &str, i: usize| b.layout[name][i];
    let mut guards = Vec::new();
    let mut guard = |b: &mut Builder, kind: &str| {
        let g = b.vertex(kind);
        b.edge(g, s);
        b.edge(g, t);
        guards.push(g);
        g
    };
    for i in 0..=n {
        let g = guard(&mut b, "uguard");
        let target = get(&b, "u", i);
        b.path(&format!("L{i}"), g, target, 2 * i + 1);
    }
    for i in 1..=n {
        let a = guard(&mut b, "a");
        let ab = guard(&mut b, "abar");
        let ap = guard(&mut b, "aprime");
        let abp = guard(&mut b, "abarprime");
        let (x, xb) = (get(&b, "x", 2 * i - 2), get(&b, "xbar", 2 * i - 2));
        let (xs, xbs) = (get(&b, "xprime", i - 1), get(&b, "xbarprime", i - 1));
        b.path(&format!("S{i}"), a, x, 2 * i + 1);
        b.path(&format!("Sbar{i}"), ab, xb, 2 * i + 1);
        b.path(&format!("Sprime{i}"), ap, xs, 2 * i);
        b.path(&format!("Sbarprime{i}"), abp, xbs, 2 * i);
    }
    for i in 0..=2 * n {
        let g = guard(&mut b, "vguard");
        let target = get(&b, "v", i);
        b.path(&format!("Lprime{i}"), g, target, i + 1);
    }
    for j in 1..=m {
        let g = guard(&mut b, "cguard");
        let target = get(&b, "c", j - 1);
        b.path(&format!("F{j}"), g, target, 2 * n + 3);
    }
    debug_assert_eq!(guards.len(), qbf_guard_count(n, m));
    b.layout.insert("Y".into(), guards.clone());
    Ok(b.finish(s, t, qbf_k(n) + guards.len(), None))
}

/// Erdos-Renyi `G(n, p)` conditioned on connectivity by rejection;
/// deterministic for a fixed seed.
pub fn random_connected_graph(n: usize, edge_prob: f64, seed: u64) -> Result<Graph, ForgeError> {
    const MAX_ATTEMPTS: usize = 10_000;
    if n < 2 {
        return Err(ForgeError::Invalid {
            what: "random graph",
            reason: format!("n = {n} < 2"),
        });
    }
    if !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(ForgeError::Invalid {
            what: "random graph",
            reason: format!("edge probability {edge_prob}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(edge_prob) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, &edges);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(ForgeError::RejectionCap {
        attempts: MAX_ATTEMPTS,
    })
}

/// Connected chordal graph grown one vertex at a time: each new vertex is
/// attached to a random clique through a random existing vertex.
pub fn random_chordal_graph(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<Vec<bool>> = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for v in 1..n {
        let anchor = rng.random_range(0..v);
        let mut clique = vec![anchor];
        for u in (0..v).filter(|&u| u != anchor) {
            if clique.iter().all(|&c| adj[c][u]) && rng.random_bool(0.5) {
                clique.push(u);
            }
        }
        for &c in &clique {
            adj[c][v] = true;
            adj[v][c] = true;
            edges.push((c, v));
        }
    }
    Graph::from_edges(n, &edges)
}

/// Every connected graph on `n` vertices, one per isomorphism class.
/// Each class is represented by its labelling with the smallest edge
/// bitmask; output is in increasing bitmask order.
pub fn connected_graphs(n: usize) -> Result<Vec<Graph>, ForgeError> {
    const LIMIT: usize = 6;
    if n > LIMIT {
        return Err(ForgeError::SizeLimit {
            what: "exhaustive graph enumeration",
            size: n,
            limit: LIMIT,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut index = vec![vec![0usize; n]; n];
    for (e, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = e;
        index[v][u] = e;
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut out = Vec::new();
    'mask: for mask in 0u64..1 << pairs.len() {
        for perm in &perms {
            let mut image = 0u64;
            for (e, &(u, v)) in pairs.iter().enumerate() {
                if mask >> e & 1 == 1 {
                    image |= 1 << index[perm[u]][perm[v]];
                }
            }
            if image < mask {
                continue 'mask;
            }
        }
        let edges: Vec<(usize, usize)> = (0..pairs.len())
            .filter(|&e| mask >> e & 1 == 1)
            .map(|e| pairs[e])
            .collect();
        let g = Graph::from_edges(n, &edges);
        if g.is_connected() {
            out.push(g);
        }
    }
    Ok(out)
}
