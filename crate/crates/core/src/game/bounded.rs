use std::collections::HashMap;

use super::{div_moves, fac_moves, DivPlacement, FacPlacement};
use crate::error::SolveError;
use crate::graph::{Graph, Vertex};

/// Depth-limited minimax from Facilitator-to-move positions, memoized on
/// `(F, D, remaining moves)`. Never enumerates the whole position space.
pub struct BoundedSearch<'g> {
    g: &'g Graph,
    k: usize,
    budget: u128,
    memo: HashMap<(FacPlacement, DivPlacement, usize), bool>,
}

impl<'g> BoundedSearch<'g> {
    pub fn new(g: &'g Graph, k: usize, budget: u128) -> Self {
        BoundedSearch {
            g,
            k,
            budget,
            memo: HashMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Memo entries stored so far.
    pub fn explored(&self) -> usize {
        self.memo.len()
    }

    /// Whether Facilitator forces a meeting within `steps` moves from
    /// `(f, d)` with Facilitator to move.
    pub fn wins(
        &mut self,
        f: &FacPlacement,
        d: &DivPlacement,
        steps: usize,
    ) -> Result<bool, SolveError> {
        if f.is_meeting() {
            return Ok(true);
        }
        if steps == 0 {
            return Ok(false);
        }
        if steps == 1 {
            return Ok(self.meets_now(f, d));
        }
        let key = (*f, d.clone(), steps);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        if self.meets_now(f, d) {
            return self.store(key, true);
        }
        let mut result = false;
        for f2 in fac_moves(self.g, f, d) {
            let mut forced = true;
            for d2 in div_moves(self.g, d, &f2) {
                if !self.wins(&f2, &d2, steps - 1)? {
                    forced = false;
                    break;
                }
            }
            if forced {
                result = true;
                break;
            }
        }
        self.store(key, result)
    }

    fn store(
        &mut self,
        key: (FacPlacement, DivPlacement, usize),
        value: bool,
    ) -> Result<bool, SolveError> {
        if self.memo.len() as u128 >= self.budget {
            return Err(SolveError::BudgetExceeded {
                stage: "bounded-search",
                estimate: self.memo.len() as u128 + 1,
                budget: self.budget,
            });
        }
        self.memo.insert(key, value);
        Ok(value)
    }

    /// A single Facilitator move ends the game.
    fn meets_now(&self, f: &FacPlacement, d: &DivPlacement) -> bool {
        let [a, b] = f.vertices();
        a == b
            || self.g.adjacent(a, b)
            || self
                .g
                .common_neighbors(a, b)
                .iter()
                .any(|&v| !d.occupies(v))
    }

    /// Compatible initial Divider placements against `{s, t}` in canonical order.
    pub fn initial_placements(&self, s: Vertex, t: Vertex) -> Vec<DivPlacement> {
        crate::util::multisets(self.g.n(), self.k)
            .into_iter()
            .map(DivPlacement::new)
            .filter(|d| !d.occupies(s) && !d.occupies(t))
            .collect()
    }

    pub fn facilitator_wins_within(
        &mut self,
        s: Vertex,
        t: Vertex,
        steps: usize,
    ) -> Result<bool, SolveError> {
        let f = FacPlacement::new(s, t);
        for d in self.initial_placements(s, t) {
            if !self.wins(&f, &d, steps)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::WinTable;
    use crate::util::multisets;

    #[test]
    fn agrees_with_table_levels() {
        let graphs = [
            Graph::cycle(6),
            Graph::path(5),
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]),
            Graph::complete_bipartite(2, 4),
        ];
        for g in &graphs {
            for k in 1..=2 {
                let table = WinTable::build(g, k, u128::MAX).unwrap();
                let mut search = BoundedSearch::new(g, k, u128::MAX);
                for f in multisets(g.n(), 2) {
                    let f = FacPlacement::new(f[0], f[1]);
                    for d in multisets(g.n(), k) {
                        let d = DivPlacement::new(d);
                        if !d.compatible_with(&f) {
                            continue;
                        }
                        for steps in 0..4 {
                            assert_eq!(
                                search.wins(&f, &d, steps).unwrap(),
                                table.level(&f, &d).within(steps)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn memo_budget() {
        let g = Graph::cycle(8);
        let mut search = BoundedSearch::new(&g, 2, 3);
        let err = search.facilitator_wins_within(0, 4, 4).unwrap_err();
        assert!(matches!(
            err,
            SolveError::BudgetExceeded {
                stage: "bounded-search",
                ..
            }
        ));
    }
}
