//! Census of every connected graph up to six vertices: how often the
//! divider number falls below the separator number.

use rendezvous::forge::connected_graphs;
use rendezvous::game::divider_number;
use rendezvous::graph::lambda;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 3..=6 {
        let graphs = connected_graphs(n)?;
        let (mut pairs, mut gaps) = (0, 0);
        for g in &graphs {
            for s in 0..n {
                for t in s + 1..n {
                    if g.adjacent(s, t) {
                        continue;
                    }
                    pairs += 1;
                    if divider_number(g, s, t, None)? < lambda(g, s, t).value {
                        gaps += 1;
                    }
                }
            }
        }
        println!(
            "n={n}: {} graphs, {pairs} non-adjacent pairs, {gaps} with d < lambda",
            graphs.len()
        );
    }
    Ok(())
}
