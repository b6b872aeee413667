//! Polynomial shortcuts for the divider number on graph classes where it
//! equals the separator number, with a dispatcher that falls back to the
//! exact game solver.

use serde::Serialize;

use crate::error::SolveError;
use crate::game::divider_number;
use crate::graph::{is_chordal, is_p5_free, lambda, Extended, Graph, Vertex};
use crate::nd::{neighborhood_decomposition, ModuleKind};

pub const ADJACENT_OR_EQUAL: &str = "adjacent-or-equal";
pub const LAMBDA_ONE: &str = "lambda-1";
pub const CHORDAL: &str = "chordal";
pub const P5_FREE: &str = "p5-free";
pub const SAME_INDEPENDENT_MODULE: &str = "same-independent-module";
pub const GENERIC: &str = "generic";

/// A divider number and the rule that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AutoResult {
    pub value: Extended,
    pub reason: &'static str,
}

/// `|N(s) ∩ N(t)|` when `s` and `t` are distinct members of one
/// independent module.
pub fn same_module_value(g: &Graph, s: Vertex, t: Vertex) -> Option<usize> {
    if s == t {
        return None;
    }
    let nd = neighborhood_decomposition(g);
    let i = nd.id[s];
    (i == nd.id[t] && nd.kinds[i] == ModuleKind::Independent)
        .then(|| g.common_neighbors(s, t).len())
}

/// Every fast path that applies, in priority order.
pub fn applicable_fast_paths(g: &Graph, s: Vertex, t: Vertex) -> Vec<AutoResult> {
    if s == t || g.adjacent(s, t) {
        return vec![AutoResult {
            value: Extended::Infinity,
            reason: ADJACENT_OR_EQUAL,
        }];
    }
    let lam = lambda(g, s, t).value;
    let mut out = Vec::new();
    if lam == Extended::Finite(1) {
        out.push(AutoResult {
            value: lam,
            reason: LAMBDA_ONE,
        });
    }
    if is_chordal(g).0 {
        out.push(AutoResult {
            value: lam,
            reason: CHORDAL,
        });
    }
    if is_p5_free(g) {
        out.push(AutoResult {
            value: lam,
            reason: P5_FREE,
        });
    }
    if let Some(v) = same_module_value(g, s, t) {
        out.push(AutoResult {
            value: Extended::Finite(v),
            reason: SAME_INDEPENDENT_MODULE,
        });
    }
    out
}

/// The first applicable fast path, or `None` when only the generic solver
/// can decide.
pub fn fast_divider_number(g: &Graph, s: Vertex, t: Vertex) -> Option<AutoResult> {
    let paths = applicable_fast_paths(g, s, t);
    debug_assert!(
        paths.windows(2).all(|w| w[0].value == w[1].value),
        "fast paths disagree: {paths:?}"
    );
    paths.into_iter().next()
}

/// Divider number by the first applicable fast path, else by the game
/// solver.
pub fn divider_number_auto(g: &Graph, s: Vertex, t: Vertex) -> Result<AutoResult, SolveError> {
    if let Some(r) = fast_divider_number(g, s, t) {
        return Ok(r);
    }
    Ok(AutoResult {
        value: divider_number(g, s, t, None)?,
        reason: GENERIC,
    })
}
