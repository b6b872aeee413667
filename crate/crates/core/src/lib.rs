//! Exact solving of the rendezvous game with adversaries: two Facilitator
//! agents try to meet on a graph while `k` Divider agents block vertices.

mod error;
pub mod forge;
pub mod game;
pub mod graph;
pub mod nd;
pub mod structural;
mod util;

pub use error::{ForgeError, InstanceError, SolveError};
pub use graph::{Extended, Graph, Instance, Vertex};
pub use util::{binomial, multisets, position_count_estimate};
