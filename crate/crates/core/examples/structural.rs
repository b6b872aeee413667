//! Which polynomial shortcut answers the divider number on a few graphs.

use rendezvous::forge::{random_chordal_graph, random_connected_graph};
use rendezvous::structural::{applicable_fast_paths, divider_number_auto};
use rendezvous::Graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graphs = [
        ("P4", Graph::path(4)),
        ("C4", Graph::cycle(4)),
        ("C7", Graph::cycle(7)),
        ("K2,3", Graph::complete_bipartite(2, 3)),
        ("chordal(10)", random_chordal_graph(10, 3)),
        ("gnp(8)", random_connected_graph(8, 0.35, 5)?),
    ];
    for (name, g) in &graphs {
        let s = 0;
        let t = (1..g.n())
            .rev()
            .find(|&t| !g.adjacent(s, t))
            .expect("some vertex is not adjacent to 0");
        let all: Vec<&str> = applicable_fast_paths(g, s, t)
            .iter()
            .map(|r| r.reason)
            .collect();
        let r = divider_number_auto(g, s, t)?;
        println!(
            "{name:>12}: d({s},{t}) = {} via {} (applicable: {all:?})",
            r.value, r.reason
        );
    }
    Ok(())
}
