use std::collections::HashMap;
use std::ops::ControlFlow;

use serde::Serialize;

use super::{Label, MoveTree, NdDecomposition};

/// One admissible choice at a move-tree node: the modules Divider keeps
/// completely occupied, and the move-tree children Facilitator can then
/// reach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeOption {
    pub blocked: Vec<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateNode {
    pub label: Label,
    pub depth: usize,
    pub parent: Option<usize>,
    /// Modules fully occupied by Divider at this node.
    pub blocked: Vec<usize>,
}

/// A module-level Divider strategy shape: a subtree of the move tree with
/// the fully occupied modules fixed at every node. Nodes are in preorder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateStrategy {
    pub nodes: Vec<CandidateNode>,
}

impl CandidateStrategy {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(u, n)| n.parent.map(|v| (v, u)))
    }
}

fn reachable(nd: &NdDecomposition, (p, q): Label, blocked: u64) -> Vec<Label> {
    let free = |m: usize| blocked & (1 << m) == 0;
    let mut out = Vec::new();
    for i in nd
        .quotient
        .closed_neighborhood(p)
        .into_iter()
        .filter(|&i| free(i))
    {
        for j in nd
            .quotient
            .closed_neighborhood(q)
            .into_iter()
            .filter(|&j| free(j))
        {
            out.push((i.min(j), i.max(j)));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Admissible options per move-tree node. Blocked sets avoid the
/// Facilitator modules, fit within `k` agents and leave no reachable pair
/// inside a single module. Among blocked sets producing the same children
/// only the inclusion-minimal ones are kept: a superset adds equality
/// constraints without changing the tree. Leaves get one empty option.
pub fn node_options(tree: &MoveTree, nd: &NdDecomposition, k: usize) -> Vec<Vec<NodeOption>> {
    let ell = nd.ell();
    assert!(ell < 64, "at most 63 modules supported");
    let mut options: Vec<Vec<NodeOption>> = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(v, node)| {
            let (p, q) = node.label;
            if p == q {
                return Vec::new();
            }
            if tree.is_leaf(v) {
                return vec![NodeOption {
                    blocked: Vec::new(),
                    children: Vec::new(),
                }];
            }
            // modules outside N[p] ∪ N[q] never change the child set, so
            // no inclusion-minimal blocked set contains one
            let mut near: Vec<usize> = nd
                .quotient
                .neighbors(p)
                .iter()
                .chain(nd.quotient.neighbors(q))
                .copied()
                .collect();
            near.sort_unstable();
            near.dedup();
            near.retain(|&m| m != p && m != q);
            let mut masks = Vec::new();
            light_subsets(nd, &near, k, 0, 0, 0, &mut masks);
            masks.sort_unstable();
            let valid: Vec<(u64, Vec<Label>)> = masks
                .into_iter()
                .map(|mask| (mask, reachable(nd, node.label, mask)))
                .filter(|(_, labels)| labels.iter().all(|&(i, j)| i != j))
                .collect();
            let mut groups: HashMap<&[Label], Vec<u64>> = HashMap::new();
            for (mask, labels) in &valid {
                groups.entry(labels.as_slice()).or_default().push(*mask);
            }
            valid
                .iter()
                .filter(|(mask, labels)| {
                    !groups[labels.as_slice()]
                        .iter()
                        .any(|&m2| m2 != *mask && m2 & mask == m2)
                })
                .map(|(mask, labels)| NodeOption {
                    blocked: (0..ell).filter(|&i| mask & (1 << i) != 0).collect(),
                    children: node
                        .children
                        .iter()
                        .copied()
                        .filter(|&c| labels.binary_search(&tree.nodes[c].label).is_ok())
                        .collect(),
                })
                .collect()
        })
        .collect();
    // an option reaching a node with no options is in no candidate;
    // children come after their parent, so one backward sweep suffices
    for v in (0..options.len()).rev() {
        let mut opts = std::mem::take(&mut options[v]);
        opts.retain(|o| o.children.iter().all(|&c| !options[c].is_empty()));
        options[v] = opts;
    }
    options
}

/// Every subset of `near[i..]`, added to `mask`, whose module sizes sum
/// to at most `k`.
fn light_subsets(
    nd: &NdDecomposition,
    near: &[usize],
    k: usize,
    i: usize,
    mask: u64,
    weight: usize,
    out: &mut Vec<u64>,
) {
    if i == near.len() {
        out.push(mask);
        return;
    }
    light_subsets(nd, near, k, i + 1, mask, weight, out);
    let w = weight + nd.size(near[i]);
    if w <= k {
        light_subsets(nd, near, k, i + 1, mask | 1 << near[i], w, out);
    }
}

/// Indices of the root options; each one is an independent part of the
/// candidate space.
pub fn root_choices(options: &[Vec<NodeOption>]) -> Vec<usize> {
    (0..options[0].len()).collect()
}

/// What the enumeration does after visiting a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Next {
    Continue,
    Stop,
    /// Every candidate sharing the first `len` choices is refuted: resume
    /// at the next option of choice `len - 1`.
    Skip(usize),
}

/// Enumeration state seen by the visitor. Choices are made node by node
/// in depth-first order, the root first; every prefix of the choice
/// sequence is itself a (partial) candidate.
pub struct Cursor<'a> {
    tree: &'a MoveTree,
    options: &'a [Vec<NodeOption>],
    choice: Vec<usize>,
    rank: Vec<usize>,
    order: Vec<usize>,
}

impl Cursor<'_> {
    pub fn choices(&self) -> usize {
        self.order.len()
    }

    pub fn candidate(&self) -> CandidateStrategy {
        self.prefix(self.order.len())
    }

    /// The candidate made of the first `len` choices. Its constraints are
    /// a subset of those of any completion.
    pub fn prefix(&self, len: usize) -> CandidateStrategy {
        let mut nodes = Vec::new();
        let mut stack = vec![(0usize, None)];
        while let Some((v, parent)) = stack.pop() {
            let opt = &self.options[v][self.choice[v]];
            let id = nodes.len();
            nodes.push(CandidateNode {
                label: self.tree.nodes[v].label,
                depth: self.tree.nodes[v].depth,
                parent,
                blocked: opt.blocked.clone(),
            });
            stack.extend(
                opt.children
                    .iter()
                    .rev()
                    .filter(|&&c| self.rank[c] < len)
                    .map(|&c| (c, Some(id))),
            );
        }
        CandidateStrategy { nodes }
    }

    /// Option indices from the root down to `v`, with `v` on option `o`
    /// and its ancestors on their current choices.
    pub fn path_key(&self, v: usize, o: usize) -> Vec<usize> {
        let mut key = vec![o];
        let mut at = self.tree.nodes[v].parent;
        while let Some(a) = at {
            key.push(self.choice[a]);
            at = self.tree.nodes[a].parent;
        }
        key.reverse();
        key
    }

    /// The one-branch candidate from the root down to `v` on option `o`.
    /// Every candidate through this branch contains its constraints.
    pub fn path(&self, v: usize, o: usize) -> CandidateStrategy {
        let mut chain = vec![(v, o)];
        let mut at = self.tree.nodes[v].parent;
        while let Some(a) = at {
            chain.push((a, self.choice[a]));
            at = self.tree.nodes[a].parent;
        }
        chain.reverse();
        CandidateStrategy {
            nodes: chain
                .iter()
                .enumerate()
                .map(|(i, &(u, o))| CandidateNode {
                    label: self.tree.nodes[u].label,
                    depth: self.tree.nodes[u].depth,
                    parent: i.checked_sub(1),
                    blocked: self.options[u][o].blocked.clone(),
                })
                .collect(),
        }
    }

    fn push(&mut self, v: usize) -> usize {
        let pos = self.order.len();
        self.rank[v] = pos;
        self.order.push(v);
        pos
    }

    fn pop(&mut self, v: usize) {
        self.order.pop();
        self.rank[v] = usize::MAX;
        self.choice[v] = usize::MAX;
    }
}

/// Search hooks: `keep(cur, v, o)` may veto option `o` at node `v` given
/// the choices above it, and `visit` sees every complete candidate.
pub trait Visitor {
    fn keep(&mut self, _cur: &Cursor, _v: usize, _o: usize) -> bool {
        true
    }

    fn visit(&mut self, cur: &Cursor) -> Next;
}

impl<F: FnMut(&Cursor) -> Next> Visitor for F {
    fn visit(&mut self, cur: &Cursor) -> Next {
        self(cur)
    }
}

/// Visits every candidate whose root uses option `root_choice` until the
/// visitor stops; `Break` means it did. A vetoed option removes every
/// candidate using it with the same choices above; when all options of a
/// node are vetoed the search returns straight to its parent.
pub fn for_each_candidate_from(
    tree: &MoveTree,
    options: &[Vec<NodeOption>],
    root_choice: usize,
    f: &mut dyn Visitor,
) -> ControlFlow<()> {
    let mut cur = Cursor {
        tree,
        options,
        choice: vec![usize::MAX; tree.len()],
        rank: vec![usize::MAX; tree.len()],
        order: Vec::new(),
    };
    if !f.keep(&cur, 0, root_choice) {
        return ControlFlow::Continue(());
    }
    cur.push(0);
    cur.choice[0] = root_choice;
    let mut pending: Vec<usize> = options[0][root_choice].children.clone();
    pending.reverse();
    match search(&mut cur, &mut pending, f) {
        Next::Stop => ControlFlow::Break(()),
        Next::Continue | Next::Skip(_) => ControlFlow::Continue(()),
    }
}

struct Frame {
    v: usize,
    pos: usize,
    next: usize,
    added: usize,
    kept: bool,
}

/// Depth-first search over the pending nodes with an explicit stack, one
/// frame per chosen node; candidates can have many thousands of nodes.
fn search(cur: &mut Cursor, pending: &mut Vec<usize>, f: &mut dyn Visitor) -> Next {
    let options = cur.options;
    let mut frames: Vec<Frame> = Vec::new();
    // `None` descends; `Some` hands a result to the innermost frame
    let mut flow: Option<Next> = None;
    loop {
        let Some(result) = flow.take() else {
            match pending.pop() {
                None => flow = Some(f.visit(cur)),
                Some(v) => {
                    let pos = cur.push(v);
                    frames.push(Frame {
                        v,
                        pos,
                        next: 0,
                        added: 0,
                        kept: false,
                    });
                    flow = Some(Next::Continue);
                }
            }
            continue;
        };
        let Some(fr) = frames.last_mut() else {
            return result;
        };
        pending.truncate(pending.len() - fr.added);
        fr.added = 0;
        let go_on = match result {
            Next::Continue => true,
            Next::Skip(len) => len > fr.pos,
            Next::Stop => false,
        };
        let mut out = result;
        if go_on {
            let v = fr.v;
            let chosen = (fr.next..options[v].len()).find(|&o| f.keep(cur, v, o));
            if let Some(o) = chosen {
                fr.next = o + 1;
                fr.kept = true;
                fr.added = options[v][o].children.len();
                cur.choice[v] = o;
                pending.extend(options[v][o].children.iter().rev());
                continue;
            }
            out = if fr.kept {
                Next::Continue
            } else {
                // the conflict lies on the branch above v
                let parent = cur.tree.nodes[v].parent.expect("the root is chosen first");
                Next::Skip(cur.rank[parent] + 1)
            };
        }
        let fr = frames.pop().unwrap();
        cur.pop(fr.v);
        pending.push(fr.v);
        flow = Some(out);
    }
}

/// Every candidate in enumeration order.
pub fn enumerate_candidates(
    tree: &MoveTree,
    nd: &NdDecomposition,
    k: usize,
) -> Vec<CandidateStrategy> {
    let options = node_options(tree, nd, k);
    let mut out = Vec::new();
    for r in root_choices(&options) {
        let _ = for_each_candidate_from(tree, &options, r, &mut |cur: &Cursor| {
            out.push(cur.candidate());
            Next::Continue
        });
    }
    out
}
