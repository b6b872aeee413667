//! Decide the unbounded game on the clique spider with one and two
//! Divider agents, and show how long the winning side needs.

use rendezvous::forge::clique_spider;
use rendezvous::game::{WinTable, DEFAULT_POSITION_BUDGET};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = clique_spider(4)?;
    println!(
        "clique spider p=4: n={} m={}",
        inst.graph.n(),
        inst.graph.edge_count()
    );
    for k in 1..=2 {
        let table = WinTable::build(&inst.graph, k, DEFAULT_POSITION_BUDGET)?;
        println!(
            "k={k}: facilitator wins = {}, start level = {}, fixpoint after {} sweeps",
            table.facilitator_wins_from(inst.s, inst.t),
            table.start_level(inst.s, inst.t),
            table.ell_star()
        );
    }
    Ok(())
}
