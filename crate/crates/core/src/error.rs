use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("agent count k must be at least 1")]
    InvalidAgentCount,
    #[error("step bound tau must be at least 1")]
    InvalidTau,
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
}

impl InstanceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            InstanceError::Json(_) => "malformed-json",
            InstanceError::SelfLoop(_) => "self-loop",
            InstanceError::DuplicateEdge(..) => "duplicate-edge",
            InstanceError::VertexOutOfRange { .. } => "vertex-out-of-range",
            InstanceError::Disconnected => "disconnected",
            InstanceError::InvalidAgentCount => "invalid-k",
            InstanceError::InvalidTau => "invalid-tau",
            InstanceError::Invalid { .. } => "invalid",
        }
    }
}

/// Errors raised by the exact solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    /// The position space (or search) is larger than the configured budget.
    #[error("{stage}: size estimate {estimate} exceeds budget {budget}")]
    BudgetExceeded {
        stage: &'static str,
        estimate: u128,
        budget: u128,
    },
    /// The divider number search stopped before an answer; the true value
    /// lies in `lower..=upper`.
    #[error("divider number undecided: lies in [{lower}, {upper}]")]
    Bracketed { lower: usize, upper: usize },
    #[error("contract violation: {0}")]
    Contract(String),
}

/// Errors raised by generators and brute-force oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForgeError {
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
    #[error("{what} exceeds the oracle size limit ({size} > {limit})")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("no connected sample after {attempts} attempts; raise the edge probability")]
    RejectionCap { attempts: usize },
}
