use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    fac_moves, multiset_adjacent, BoundedSearch, DivPlacement, FacPlacement,
    DEFAULT_POSITION_BUDGET,
};
use crate::error::SolveError;
use crate::graph::{Graph, Vertex};

/// Certificate of a Divider win for a fixed number of moves: one Divider
/// reply under every legal Facilitator move, down to depth `tau`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyTree {
    pub f: FacPlacement,
    pub d: DivPlacement,
    #[serde(default)]
    pub children: Vec<StrategyTree>,
}

impl StrategyTree {
    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(StrategyTree::node_count)
            .sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Nodes in preorder, with depth.
    pub fn preorder(&self) -> Vec<(usize, &StrategyTree)> {
        let mut out = Vec::new();
        let mut stack = vec![(0, self)];
        while let Some((depth, node)) = stack.pop() {
            out.push((depth, node));
            stack.extend(node.children.iter().rev().map(|c| (depth + 1, c)));
        }
        out
    }

    /// The node at preorder index `i`.
    pub fn node_mut(&mut self, i: usize) -> Option<&mut StrategyTree> {
        fn walk<'a>(node: &'a mut StrategyTree, i: &mut usize) -> Option<&'a mut StrategyTree> {
            if *i == 0 {
                return Some(node);
            }
            *i -= 1;
            for c in node.children.iter_mut() {
                if let Some(found) = walk(c, i) {
                    return Some(found);
                }
            }
            None
        }
        let mut i = i;
        walk(self, &mut i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => f.write_str("valid"),
            Verdict::Invalid(reason) => write!(f, "invalid: {reason}"),
        }
    }
}

/// Builds a Divider strategy tree of height `tau`. Ties resolve to the
/// first surviving placement in canonical order.
pub fn extract_divider_strategy(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    k: usize,
    tau: usize,
) -> Result<StrategyTree, SolveError> {
    let mut search = BoundedSearch::new(g, k, DEFAULT_POSITION_BUDGET);
    let f = FacPlacement::new(s, t);
    let mut root = None;
    for d in search.initial_placements(s, t) {
        if !search.wins(&f, &d, tau)? {
            root = Some(d);
            break;
        }
    }
    let Some(d) = root else {
        return Err(SolveError::Contract(format!(
            "Facilitator wins within {tau} moves; no Divider strategy exists"
        )));
    };
    grow(g, &mut search, f, d, tau)
}

fn grow(
    g: &Graph,
    search: &mut BoundedSearch<'_>,
    f: FacPlacement,
    d: DivPlacement,
    remaining: usize,
) -> Result<StrategyTree, SolveError> {
    let mut children = Vec::new();
    if remaining > 0 {
        for f2 in fac_moves(g, &f, &d) {
            let mut reply = None;
            for d2 in super::div_moves(g, &d, &f2) {
                if !search.wins(&f2, &d2, remaining - 1)? {
                    reply = Some(d2);
                    break;
                }
            }
            let d2 =
                reply.ok_or_else(|| SolveError::Contract(format!("no surviving reply at {f2}")))?;
            children.push(grow(g, search, f2, d2, remaining - 1)?);
        }
    }
    Ok(StrategyTree { f, d, children })
}

/// Checks every certificate condition: the root starts at `{s, t}`,
/// Facilitator agents never coincide, every placement has `k` agents and
/// avoids the Facilitator, each Divider reply is one legal move away,
/// and each node above depth `tau` branches on exactly the legal
/// Facilitator moves while nodes at depth `tau` are leaves.
pub fn verify_strategy_tree(
    g: &Graph,
    s: Vertex,
    t: Vertex,
    k: usize,
    tau: usize,
    tree: &StrategyTree,
) -> Verdict {
    if tree.f != FacPlacement::new(s, t) {
        return Verdict::Invalid(format!("root pair {} is not {{{s},{t}}}", tree.f));
    }
    match check(g, k, tau, tree, 0) {
        Ok(()) => Verdict::Valid,
        Err(reason) => Verdict::Invalid(reason),
    }
}

fn check(g: &Graph, k: usize, tau: usize, node: &StrategyTree, depth: usize) -> Result<(), String> {
    let n = g.n();
    let [a, b] = node.f.vertices();
    if b >= n || node.d.agents().iter().any(|&v| v >= n) {
        return Err(format!("vertex out of range at depth {depth}"));
    }
    if node.f.is_meeting() {
        return Err(format!("Facilitator agents meet at {a} (depth {depth})"));
    }
    if node.d.len() != k {
        return Err(format!(
            "placement {:?} has {} agents, expected {k}",
            node.d.agents(),
            node.d.len()
        ));
    }
    if !node.d.compatible_with(&node.f) {
        return Err(format!(
            "placement {:?} occupies a Facilitator vertex of {}",
            node.d.agents(),
            node.f
        ));
    }
    if depth == tau {
        if !node.children.is_empty() {
            return Err(format!(
                "node {} at depth {depth} has children beyond the horizon",
                node.f
            ));
        }
        return Ok(());
    }
    let expected: BTreeSet<FacPlacement> = fac_moves(g, &node.f, &node.d).into_iter().collect();
    let mut seen = BTreeSet::new();
    for child in &node.children {
        if !expected.contains(&child.f) {
            return Err(format!(
                "child pair {} is not a legal move from {} (depth {depth})",
                child.f, node.f
            ));
        }
        if !seen.insert(child.f) {
            return Err(format!(
                "Facilitator move {} appears twice under {} (depth {depth})",
                child.f, node.f
            ));
        }
        if child.d.len() != node.d.len() || !multiset_adjacent(g, node.d.agents(), child.d.agents())
        {
            return Err(format!(
                "reply {:?} is not one move from {:?} (depth {})",
                child.d.agents(),
                node.d.agents(),
                depth + 1
            ));
        }
    }
    if let Some(missing) = expected.difference(&seen).next() {
        return Err(format!(
            "missing branch for Facilitator move {missing} under {} (depth {depth})",
            node.f
        ));
    }
    node.children
        .iter()
        .try_for_each(|c| check(g, k, tau, c, depth + 1))
}
