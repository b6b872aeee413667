//! Exact solving of the rendezvous game: positions, legal moves, the
//! layered winning sets, step-bounded search, strategy certificates and
//! optimal-play hints.

mod bounded;
mod hints;
mod strategy;
mod table;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::graph::{lambda, Extended, Graph, Vertex};

pub use bounded::BoundedSearch;
pub use hints::{best_moves, Hint, Move};
pub use strategy::{extract_divider_strategy, verify_strategy_tree, StrategyTree, Verdict};
pub use table::WinTable;

/// Default cap on the number of compatible positions a solver may touch.
pub const DEFAULT_POSITION_BUDGET: u128 = 5_000_000;

/// Placement of the two Facilitator agents, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[Vertex; 2]", into = "[Vertex; 2]")]
pub struct FacPlacement([Vertex; 2]);

impl FacPlacement {
    pub fn new(a: Vertex, b: Vertex) -> Self {
        FacPlacement([a.min(b), a.max(b)])
    }

    pub fn vertices(&self) -> [Vertex; 2] {
        self.0
    }

    /// The two agents share a vertex: Facilitator has won.
    pub fn is_meeting(&self) -> bool {
        self.0[0] == self.0[1]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0[0] == v || self.0[1] == v
    }
}

impl From<[Vertex; 2]> for FacPlacement {
    fn from(p: [Vertex; 2]) -> Self {
        FacPlacement::new(p[0], p[1])
    }
}

impl From<FacPlacement> for [Vertex; 2] {
    fn from(p: FacPlacement) -> Self {
        p.0
    }
}

impl fmt::Display for FacPlacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0[0], self.0[1])
    }
}

/// Placement of the Divider agents as a sorted multiset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<Vertex>", into = "Vec<Vertex>")]
pub struct DivPlacement(Vec<Vertex>);

impl DivPlacement {
    pub fn new(mut agents: Vec<Vertex>) -> Self {
        agents.sort_unstable();
        DivPlacement(agents)
    }

    pub fn agents(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn occupies(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn compatible_with(&self, f: &FacPlacement) -> bool {
        !f.vertices().iter().any(|&v| self.occupies(v))
    }
}

impl From<Vec<Vertex>> for DivPlacement {
    fn from(v: Vec<Vertex>) -> Self {
        DivPlacement::new(v)
    }
}

impl From<DivPlacement> for Vec<Vertex> {
    fn from(d: DivPlacement) -> Self {
        d.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    Facilitator,
    Divider,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Position {
    pub f: FacPlacement,
    pub d: DivPlacement,
    pub turn: Turn,
}

impl Position {
    pub fn new(f: FacPlacement, d: DivPlacement, turn: Turn) -> Self {
        debug_assert!(d.compatible_with(&f), "incompatible position");
        Position { f, d, turn }
    }
}

/// Least number of Facilitator moves that force a meeting, or
/// `NotWinning` when Divider can hold out forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    At(u32),
    NotWinning,
}

impl Level {
    pub fn within(self, steps: usize) -> bool {
        matches!(self, Level::At(l) if (l as usize) <= steps)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::At(l) => write!(f, "{l}"),
            Level::NotWinning => write!(f, "inf"),
        }
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Level::At(l) => serializer.serialize_u32(*l),
            Level::NotWinning => serializer.serialize_str("inf"),
        }
    }
}

/// Whether two equal-size vertex multisets can be matched so that every
/// element maps to itself or a neighbor. Bipartite matching by augmenting
/// paths.
pub fn multiset_adjacent(g: &Graph, x: &[Vertex], y: &[Vertex]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    fn augment(
        g: &Graph,
        x: &[Vertex],
        y: &[Vertex],
        i: usize,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..y.len() {
            if seen[j] || !g.adjacent_or_equal(x[i], y[j]) {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none() || augment(g, x, y, owner[j].unwrap(), seen, owner) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; y.len()];
    for i in 0..x.len() {
        let mut seen = vec![false; y.len()];
        if !augment(g, x, y, i, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}

/// All Facilitator placements reachable from `f` in one move while
/// avoiding Divider-occupied vertices. Staying put is included.
pub fn fac_moves(g: &Graph, f: &FacPlacement, d: &DivPlacement) -> Vec<FacPlacement> {
    debug_assert!(d.compatible_with(f));
    let [a, b] = f.vertices();
    let na: Vec<Vertex> = g
        .closed_neighborhood(a)
        .into_iter()
        .filter(|&v| !d.occupies(v))
        .collect();
    let nb: Vec<Vertex> = g
        .closed_neighborhood(b)
        .into_iter()
        .filter(|&v| !d.occupies(v))
        .collect();
    let mut out: Vec<FacPlacement> = na
        .iter()
        .flat_map(|&x| nb.iter().map(move |&y| FacPlacement::new(x, y)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// All Divider placements reachable from `d` in one move while avoiding
/// the Facilitator agents at `f`. Staying put is included; two agents may
/// swap along an edge.
pub fn div_moves(g: &Graph, d: &DivPlacement, f: &FacPlacement) -> Vec<DivPlacement> {
    debug_assert!(d.compatible_with(f));
    let options: Vec<Vec<Vertex>> = d
        .agents()
        .iter()
        .map(|&v| {
            g.closed_neighborhood(v)
                .into_iter()
                .filter(|&w| !f.contains(w))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d.len());
    product_rec(&options, &mut cur, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

fn product_rec(options: &[Vec<Vertex>], cur: &mut Vec<Vertex>, out: &mut Vec<DivPlacement>) {
    if cur.len() == options.len() {
        out.push(DivPlacement::new(cur.clone()));
        return;
    }
    for &v in &options[cur.len()] {
        cur.push(v);
        product_rec(options, cur, out);
        cur.pop();
    }
}

/// Facilitator wins in a single move: the agents start together, start
/// adjacent, or share more free common neighbors than Divider has agents.
pub fn one_step_win(g: &Graph, s: Vertex, t: Vertex, k: usize) -> bool {
    s == t || g.adjacent(s, t) || g.common_neighbors(s, t).len() > k
}

/// Layered winning sets for `k` Divider agents under the default budget.
pub fn winning_sets(g: &Graph, k: usize) -> Result<WinTable, SolveError> {
    WinTable::build(g, k, DEFAULT_POSITION_BUDGET)
}

/// Whether Facilitator wins the unbounded game against `k` agents.
pub fn facilitator_wins(g: &Graph, s: Vertex, t: Vertex, k: usize) -> Result<bool, SolveError> {
    facilitator_wins_with(g, s, t, k, DEFAULT_POSITION_BUDGET)
}

pub fn facilitator_wins_with(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    k: usize,
    budget: u128,
) -> Result<bool, SolveError> {
    if s == t || g.adjacent(s, t) {
        return Ok(true);
    }
    let table = WinTable::build(g, k, budget)?;
    Ok(table.facilitator_wins_from(s, t))
}

/// How the step-bounded question is answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundedMode {
    /// Depth-limited minimax from the start position.
    #[default]
    Search,
    /// Build the full win table and read off levels.
    Table,
}

/// Whether Facilitator forces a meeting within `tau` moves against every
/// initial Divider placement.
pub fn facilitator_wins_in(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    k: usize,
    tau: usize,
) -> Result<bool, SolveError> {
    facilitator_wins_in_with(
        g,
        s,
        t,
        k,
        tau,
        BoundedMode::Search,
        DEFAULT_POSITION_BUDGET,
    )
}

pub fn facilitator_wins_in_with(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    k: usize,
    tau: usize,
    mode: BoundedMode,
    budget: u128,
) -> Result<bool, SolveError> {
    if s == t {
        return Ok(true);
    }
    if tau == 0 {
        return Ok(false);
    }
    if g.adjacent(s, t) {
        return Ok(true);
    }
    match mode {
        BoundedMode::Table => Ok(WinTable::build(g, k, budget)?.facilitator_wins_within(s, t, tau)),
        BoundedMode::Search => {
            let mut search = BoundedSearch::new(g, k, budget);
            search.facilitator_wins_within(s, t, tau)
        }
    }
}

/// The smallest team size with which Divider wins, searched upward from 1.
/// The separator number bounds the search. With `max_k` below the
/// separator number an undecided search reports a bracketing interval.
pub fn divider_number(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    max_k: Option<usize>,
) -> Result<Extended, SolveError> {
    divider_number_with(g, s, t, max_k, DEFAULT_POSITION_BUDGET)
}

pub fn divider_number_with(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    max_k: Option<usize>,
    budget: u128,
) -> Result<Extended, SolveError> {
    let upper = match lambda(g, s, t).value {
        Extended::Infinity => return Ok(Extended::Infinity),
        Extended::Finite(l) => l,
    };
    let cap = max_k.map_or(upper, |m| m.min(upper));
    for k in 1..=cap {
        if k == upper {
            // agents parked on a minimum separator never let the pair meet
            return Ok(Extended::Finite(upper));
        }
        match facilitator_wins_with(g, s, t, k, budget) {
            Ok(true) => continue,
            Ok(false) => return Ok(Extended::Finite(k)),
            Err(SolveError::BudgetExceeded { .. }) => {
                return Err(SolveError::Bracketed { lower: k, upper })
            }
            Err(e) => return Err(e),
        }
    }
    Err(SolveError::Bracketed {
        lower: cap + 1,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn brute_adjacent(g: &Graph, x: &[Vertex], y: &[Vertex]) -> bool {
        x.len() == y.len()
            && (0..y.len()).permutations(y.len()).any(|perm| {
                x.iter()
                    .zip(perm)
                    .all(|(&a, j)| g.adjacent_or_equal(a, y[j]))
            })
    }

    #[test]
    fn multiset_adjacency_examples() {
        let p3 = Graph::path(3);
        assert!(multiset_adjacent(&p3, &[0, 2], &[0, 2]));
        assert!(multiset_adjacent(&p3, &[0, 0], &[1, 1]));
        assert!(multiset_adjacent(&p3, &[0, 2], &[1, 1]));
        assert!(!multiset_adjacent(&p3, &[0, 0], &[2, 2]));
        assert!(!multiset_adjacent(&p3, &[0], &[0, 1]));
    }

    #[test]
    fn multiset_adjacency_matches_permutations() {
        let graphs = [
            Graph::path(4),
            Graph::cycle(5),
            Graph::complete_bipartite(2, 3),
        ];
        for g in &graphs {
            for size in 1..=3 {
                let sets = crate::util::multisets(g.n(), size);
                for x in &sets {
                    for y in &sets {
                        assert_eq!(
                            multiset_adjacent(g, x, y),
                            brute_adjacent(g, x, y),
                            "{x:?} {y:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fac_move_examples() {
        let p3 = Graph::path(3);
        let f = FacPlacement::new(0, 2);
        assert_eq!(fac_moves(&p3, &f, &DivPlacement::new(vec![1])), vec![f]);
        let k3 = Graph::complete(3);
        let moves = fac_moves(&k3, &FacPlacement::new(0, 1), &DivPlacement::new(vec![2]));
        assert_eq!(
            moves,
            vec![
                FacPlacement::new(0, 0),
                FacPlacement::new(0, 1),
                FacPlacement::new(1, 1)
            ]
        );
    }

    #[test]
    fn div_move_examples() {
        let p3 = Graph::path(3);
        let d = DivPlacement::new(vec![1]);
        assert_eq!(div_moves(&p3, &d, &FacPlacement::new(0, 2)), vec![d]);
        // star with center 0 and leaves 1, 2, 3
        let star = Graph::complete_bipartite(1, 3);
        let moves = div_moves(&star, &DivPlacement::new(vec![0]), &FacPlacement::new(1, 2));
        assert_eq!(
            moves,
            vec![DivPlacement::new(vec![0]), DivPlacement::new(vec![3])]
        );
    }

    #[test]
    fn moves_agree_with_adjacency_definition() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]);
        for d in crate::util::multisets(5, 2) {
            let d = DivPlacement::new(d);
            for f in crate::util::multisets(5, 2) {
                let f = FacPlacement::new(f[0], f[1]);
                if !d.compatible_with(&f) {
                    continue;
                }
                let expected: Vec<FacPlacement> = crate::util::multisets(5, 2)
                    .into_iter()
                    .map(|p| FacPlacement::new(p[0], p[1]))
                    .filter(|p| {
                        d.compatible_with(p) && multiset_adjacent(&g, &f.vertices(), &p.vertices())
                    })
                    .collect();
                assert_eq!(fac_moves(&g, &f, &d), expected);
                let expected: Vec<DivPlacement> = crate::util::multisets(5, 2)
                    .into_iter()
                    .map(DivPlacement::new)
                    .filter(|p| {
                        p.compatible_with(&f) && multiset_adjacent(&g, d.agents(), p.agents())
                    })
                    .collect();
                assert_eq!(div_moves(&g, &d, &f), expected);
            }
        }
    }

    #[test]
    fn one_step_examples() {
        let c4 = Graph::cycle(4);
        assert!(one_step_win(&c4, 1, 1, 5));
        assert!(one_step_win(&c4, 0, 2, 1));
        assert!(!one_step_win(&c4, 0, 2, 2));
    }

    #[test]
    fn bounded_examples() {
        let p3 = Graph::path(3);
        assert!(facilitator_wins_in(&p3, 0, 1, 3, 1).unwrap());
        let star = Graph::complete_bipartite(1, 3);
        assert!(!facilitator_wins_in(&star, 1, 2, 1, 1).unwrap());
        let c4 = Graph::cycle(4);
        assert!(facilitator_wins_in(&c4, 0, 2, 1, 1).unwrap());
    }

    #[test]
    fn unbounded_examples() {
        let p3 = Graph::path(3);
        assert!(facilitator_wins(&p3, 1, 1, 1).unwrap());
        assert!(!facilitator_wins(&p3, 0, 2, 1).unwrap());
        assert_eq!(
            divider_number(&p3, 0, 2, None).unwrap(),
            Extended::Finite(1)
        );
        assert_eq!(divider_number(&p3, 0, 1, None).unwrap(), Extended::Infinity);
        let c6 = Graph::cycle(6);
        assert!(facilitator_wins(&c6, 0, 3, 1).unwrap());
        assert_eq!(
            divider_number(&c6, 0, 3, None).unwrap(),
            Extended::Finite(2)
        );
    }

    #[test]
    fn divider_number_bracket() {
        let c6 = Graph::cycle(6);
        let err = divider_number(&c6, 0, 3, Some(1)).unwrap_err();
        assert_eq!(err, SolveError::Bracketed { lower: 2, upper: 2 });
    }
}
