//! Step-bounded play: the shortest horizon within which Facilitator
//! forces a meeting, by depth-limited search and by table lookup.

use rendezvous::game::{facilitator_wins_in_with, BoundedMode, DEFAULT_POSITION_BUDGET};
use rendezvous::Graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Graph::cycle(9);
    for k in 1..=2 {
        for tau in 1..=6 {
            let search = facilitator_wins_in_with(
                &g,
                0,
                4,
                k,
                tau,
                BoundedMode::Search,
                DEFAULT_POSITION_BUDGET,
            )?;
            let table = facilitator_wins_in_with(
                &g,
                0,
                4,
                k,
                tau,
                BoundedMode::Table,
                DEFAULT_POSITION_BUDGET,
            )?;
            assert_eq!(search, table);
            println!("C9, s=0 t=4, k={k}, tau={tau}: facilitator wins = {search}");
        }
    }
    Ok(())
}
