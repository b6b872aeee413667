use super::ilp::{Cmp, IlpSystem};
use super::{CandidateStrategy, ModuleKind};
use crate::graph::Graph;

/// Integer system whose solutions are Divider agent flows realising the
/// candidate. At every node `x_i` counts agents on distinct vertices of
/// module `i` (blockers) and `y_i` the remaining ones (dwellers). Along a
/// tree edge, for each ordered pair of adjacent modules `(i, j)`, `a`
/// moves blockers to blockers, `b` blockers to dwellers, `c` dwellers to
/// blockers, `d` dwellers to dwellers; `z_i` promotes dwellers to blockers
/// inside a clique module.
///
/// Node variables get their depth as branching priority and flow
/// variables come last: once a node's counts are fixed, its subtrees are
/// independent components.
pub fn build_ilp(
    cand: &CandidateStrategy,
    quotient: &Graph,
    kinds: &[ModuleKind],
    sizes: &[usize],
    k: usize,
) -> IlpSystem {
    let ell = sizes.len();
    let k = k as i64;
    let mut sys = IlpSystem::new();
    let mut x = Vec::with_capacity(cand.nodes.len());
    let mut y = Vec::with_capacity(cand.nodes.len());
    for (v, node) in cand.nodes.iter().enumerate() {
        let xv: Vec<usize> = (0..ell)
            .map(|i| sys.add_var(format!("x{i}@{v}"), 0, k))
            .collect();
        let yv: Vec<usize> = (0..ell)
            .map(|i| sys.add_var(format!("y{i}@{v}"), 0, k))
            .collect();
        let (p, q) = node.label;
        sys.add(
            xv.iter().chain(&yv).map(|&var| (var, 1)).collect(),
            Cmp::Eq,
            k,
            "const-one",
            v,
        );
        for i in 0..ell {
            let n = sizes[i] as i64;
            if i == p || i == q {
                sys.add(vec![(xv[i], 1)], Cmp::Le, n - 1, "const-three", v);
                if n == 1 {
                    sys.add(vec![(yv[i], 1)], Cmp::Eq, 0, "const-four", v);
                }
            } else {
                sys.add(vec![(xv[i], 1)], Cmp::Le, n, "const-two", v);
            }
        }
        for &i in &node.blocked {
            sys.add(vec![(xv[i], 1)], Cmp::Eq, sizes[i] as i64, "const-five", v);
        }
        for &var in xv.iter().chain(&yv) {
            sys.priority[var] = node.depth as u32;
        }
        x.push(xv);
        y.push(yv);
    }
    let pairs: Vec<(usize, usize)> = quotient
        .edges()
        .into_iter()
        .flat_map(|(i, j)| [(i, j), (j, i)])
        .collect();
    for (v, u) in cand.edges() {
        let flow = |name: &str, sys: &mut IlpSystem| -> Vec<usize> {
            pairs
                .iter()
                .map(|&(i, j)| {
                    let var = sys.add_var(format!("{name}{i}>{j}@{u}"), 0, k);
                    sys.priority[var] = u32::MAX;
                    var
                })
                .collect()
        };
        let a = flow("a", &mut sys);
        let b = flow("b", &mut sys);
        let c = flow("c", &mut sys);
        let d = flow("d", &mut sys);
        let z: Vec<usize> = (0..ell)
            .map(|i| {
                let var = sys.add_var(format!("z{i}@{u}"), 0, k);
                sys.priority[var] = u32::MAX;
                var
            })
            .collect();
        for i in 0..ell {
            if kinds[i] == ModuleKind::Independent {
                sys.add(vec![(z[i], 1)], Cmp::Eq, 0, "const-seven", u);
            }
            let out: Vec<usize> = (0..pairs.len()).filter(|&e| pairs[e].0 == i).collect();
            let into: Vec<usize> = (0..pairs.len()).filter(|&e| pairs[e].1 == i).collect();

            let mut leave_x: Vec<(usize, i64)> =
                out.iter().flat_map(|&e| [(a[e], 1), (b[e], 1)]).collect();
            leave_x.push((x[v][i], -1));
            sys.add(leave_x, Cmp::Le, 0, "const-eight", u);
            let mut leave_y: Vec<(usize, i64)> =
                out.iter().flat_map(|&e| [(c[e], 1), (d[e], 1)]).collect();
            leave_y.extend([(z[i], 1), (y[v][i], -1)]);
            sys.add(leave_y, Cmp::Le, 0, "const-eight", u);

            let mut nine = vec![(x[u][i], 1), (x[v][i], -1), (z[i], -1)];
            nine.extend(out.iter().flat_map(|&e| [(a[e], 1), (b[e], 1)]));
            nine.extend(into.iter().flat_map(|&e| [(a[e], -1), (c[e], -1)]));
            sys.add(nine, Cmp::Eq, 0, "const-nine", u);

            let mut ten = vec![(y[u][i], 1), (y[v][i], -1), (z[i], 1)];
            ten.extend(out.iter().flat_map(|&e| [(c[e], 1), (d[e], 1)]));
            ten.extend(into.iter().flat_map(|&e| [(b[e], -1), (d[e], -1)]));
            sys.add(ten, Cmp::Eq, 0, "const-ten", u);
        }
    }
    sys
}
