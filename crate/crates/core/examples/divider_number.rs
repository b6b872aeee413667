//! The divider number against the separator number on both spider
//! families: the separator number grows with p while two agents always
//! suffice.

use rendezvous::forge::{clique_spider, path_spider};
use rendezvous::game::divider_number;
use rendezvous::graph::lambda;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in 2..=4 {
        let inst = clique_spider(p)?;
        let d = divider_number(&inst.graph, inst.s, inst.t, None)?;
        println!(
            "clique spider p={p}: lambda={} d={d}",
            lambda(&inst.graph, inst.s, inst.t).value
        );
    }
    for p in 2..=3 {
        let inst = path_spider(p)?;
        let d = divider_number(&inst.graph, inst.s, inst.t, None)?;
        println!(
            "path spider p={p}: lambda={} d={d}",
            lambda(&inst.graph, inst.s, inst.t).value
        );
    }
    // capping the search below the answer yields an interval
    let inst = path_spider(3)?;
    match divider_number(&inst.graph, inst.s, inst.t, Some(1)) {
        Err(e) => println!("capped at k=1: {e}"),
        Ok(d) => println!("capped at k=1: {d}"),
    }
    Ok(())
}
