use std::fmt::Write as _;

use rayon::prelude::*;

use super::{DivPlacement, FacPlacement, Level};
use crate::error::SolveError;
use crate::graph::{Graph, Vertex};
use crate::util::{binomial, multisets, position_count_estimate};

const NOT_WINNING: u32 = u32::MAX;

/// Facilitator-to-move levels for every compatible position on one graph
/// and one Divider team size, computed by backward induction.
///
/// Positions are interned by colex rank: a pair `a <= b` has rank
/// `b(b+1)/2 + a`, a sorted multiset `d` has rank `sum C(d_i + i, i + 1)`.
#[derive(Debug, Clone)]
pub struct WinTable {
    n: usize,
    k: usize,
    num_d: usize,
    /// Divider multisets, flattened in rank order.
    dflat: Vec<Vertex>,
    /// `level[f * num_d + d]`.
    level: Vec<u32>,
    ell_star: u32,
    /// Binomials `C(c, j)` for `c < n + k`, `j <= k`.
    choose: Vec<Vec<usize>>,
}

fn pair_rank(a: Vertex, b: Vertex) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    b * (b + 1) / 2 + a
}

fn pair_unrank(r: usize) -> (Vertex, Vertex) {
    let mut b = ((((8 * r + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
    while b * (b + 1) / 2 > r {
        b -= 1;
    }
    while (b + 1) * (b + 2) / 2 <= r {
        b += 1;
    }
    (r - b * (b + 1) / 2, b)
}

impl WinTable {
    /// Runs the layered sweeps to their fixpoint. Fails without allocating
    /// when the compatible-position count exceeds `budget`.
    pub fn build(g: &Graph, k: usize, budget: u128) -> Result<Self, SolveError> {
        let n = g.n();
        let estimate = position_count_estimate(n, k);
        if estimate > budget {
            return Err(SolveError::BudgetExceeded {
                stage: "win-table",
                estimate,
                budget,
            });
        }
        let choose: Vec<Vec<usize>> = (0..n + k)
            .map(|c| {
                (0..=k)
                    .map(|j| binomial(c as u128, j as u128) as usize)
                    .collect()
            })
            .collect();
        let num_d = binomial((n + k - 1) as u128, k as u128) as usize;
        let num_f = n * (n + 1) / 2;
        let mut dflat = vec![0; num_d * k];
        let mut table = WinTable {
            n,
            k,
            num_d,
            dflat: Vec::new(),
            level: Vec::new(),
            ell_star: 0,
            choose,
        };
        for d in multisets(n, k) {
            let r = table.div_rank(&d);
            dflat[r * k..(r + 1) * k].copy_from_slice(&d);
        }
        table.dflat = dflat;

        // Divider neighbourhoods ignoring the Facilitator; filtered per use.
        let dnbr: Vec<Vec<u32>> = (0..num_d)
            .into_par_iter()
            .map(|r| {
                let options: Vec<Vec<Vertex>> = table
                    .div(r)
                    .iter()
                    .map(|&v| g.closed_neighborhood(v))
                    .collect();
                let mut out = Vec::new();
                let mut cur = vec![0; k];
                table.collect_products(&options, 0, &mut cur, &mut out);
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        let fnbr: Vec<Vec<u32>> = (0..num_f)
            .map(|r| {
                let (a, b) = pair_unrank(r);
                let (na, nb) = (g.closed_neighborhood(a), g.closed_neighborhood(b));
                let mut out: Vec<u32> = na
                    .iter()
                    .flat_map(|&x| nb.iter().map(move |&y| pair_rank(x, y) as u32))
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();

        let mut level = vec![NOT_WINNING; num_f * num_d];
        for v in 0..n {
            let f = pair_rank(v, v);
            for d in 0..num_d {
                if table.compatible(v, v, d) {
                    level[f * num_d + d] = 0;
                }
            }
        }
        let mut divwin = vec![false; num_f * num_d];
        let mut ell = 1u32;
        loop {
            // Divider-to-move nodes all of whose responses are already won
            divwin
                .par_chunks_mut(num_d)
                .enumerate()
                .for_each(|(f, row)| {
                    let (a, b) = pair_unrank(f);
                    for (d, slot) in row.iter_mut().enumerate() {
                        if *slot || !table.compatible(a, b, d) {
                            continue;
                        }
                        *slot = dnbr[d].iter().all(|&d2| {
                            let d2 = d2 as usize;
                            !table.compatible(a, b, d2) || level[f * num_d + d2] < ell
                        });
                    }
                });
            let fresh: Vec<(usize, usize)> = (0..num_f)
                .into_par_iter()
                .flat_map_iter(|f| {
                    let (a, b) = pair_unrank(f);
                    let level = &level;
                    let divwin = &divwin;
                    let fnbr = &fnbr;
                    let table = &table;
                    (0..num_d).filter_map(move |d| {
                        if a == b
                            || level[f * num_d + d] != NOT_WINNING
                            || !table.compatible(a, b, d)
                        {
                            return None;
                        }
                        let dv = table.div(d);
                        fnbr[f]
                            .iter()
                            .any(|&f2| {
                                let (x, y) = pair_unrank(f2 as usize);
                                !dv.contains(&x)
                                    && !dv.contains(&y)
                                    && divwin[f2 as usize * num_d + d]
                            })
                            .then_some((f, d))
                    })
                })
                .collect();
            if fresh.is_empty() {
                break;
            }
            for (f, d) in fresh {
                level[f * num_d + d] = ell;
            }
            ell += 1;
        }
        table.level = level;
        table.ell_star = ell;
        Ok(table)
    }

    fn collect_products(
        &self,
        options: &[Vec<Vertex>],
        i: usize,
        cur: &mut Vec<Vertex>,
        out: &mut Vec<u32>,
    ) {
        if i == options.len() {
            let mut sorted = cur.clone();
            sorted.sort_unstable();
            out.push(self.div_rank(&sorted) as u32);
            return;
        }
        for &v in &options[i] {
            cur[i] = v;
            self.collect_products(options, i + 1, cur, out);
        }
    }

    fn div_rank(&self, d: &[Vertex]) -> usize {
        d.iter()
            .enumerate()
            .map(|(i, &v)| self.choose[v + i][i + 1])
            .sum()
    }

    fn div(&self, r: usize) -> &[Vertex] {
        &self.dflat[r * self.k..(r + 1) * self.k]
    }

    fn compatible(&self, a: Vertex, b: Vertex, d: usize) -> bool {
        let dv = self.div(d);
        !dv.contains(&a) && !dv.contains(&b)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// First index at which a sweep added no position.
    pub fn ell_star(&self) -> usize {
        self.ell_star as usize
    }

    /// Least number of Facilitator moves that force a meeting from the
    /// Facilitator-to-move position `(f, d)`.
    pub fn level(&self, f: &FacPlacement, d: &DivPlacement) -> Level {
        assert_eq!(d.len(), self.k, "placement size differs from table");
        debug_assert!(d.compatible_with(f));
        let [a, b] = f.vertices();
        match self.level[pair_rank(a, b) * self.num_d + self.div_rank(d.agents())] {
            NOT_WINNING => Level::NotWinning,
            l => Level::At(l),
        }
    }

    /// Compatible initial Divider placements against `{s, t}` in canonical order.
    pub fn initial_placements(&self, s: Vertex, t: Vertex) -> Vec<DivPlacement> {
        multisets(self.n, self.k)
            .into_iter()
            .map(DivPlacement::new)
            .filter(|d| !d.occupies(s) && !d.occupies(t))
            .collect()
    }

    /// Worst level over every initial Divider placement.
    pub fn start_level(&self, s: Vertex, t: Vertex) -> Level {
        let f = FacPlacement::new(s, t);
        self.initial_placements(s, t)
            .iter()
            .map(|d| self.level(&f, d))
            .max()
            .unwrap_or(Level::At(0))
    }

    pub fn facilitator_wins_from(&self, s: Vertex, t: Vertex) -> bool {
        self.start_level(s, t) != Level::NotWinning
    }

    pub fn facilitator_wins_within(&self, s: Vertex, t: Vertex, tau: usize) -> bool {
        s == t || self.start_level(s, t).within(tau)
    }

    /// Diagnostic export, one compatible position per line: `f1,f2,d...,level`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for f in 0..self.n * (self.n + 1) / 2 {
            let (a, b) = pair_unrank(f);
            for d in multisets(self.n, self.k) {
                if d.contains(&a) || d.contains(&b) {
                    continue;
                }
                let l = self.level[f * self.num_d + self.div_rank(&d)];
                let _ = write!(out, "{a},{b}");
                for v in &d {
                    let _ = write!(out, ",{v}");
                }
                if l == NOT_WINNING {
                    out.push_str(",inf\n");
                } else {
                    let _ = writeln!(out, ",{l}");
                }
            }
        }
        out
    }
}
