//! Extract a Divider strategy tree, check it, then break it.

use rendezvous::forge::clique_spider;
use rendezvous::game::{extract_divider_strategy, verify_strategy_tree, DivPlacement};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = clique_spider(2)?;
    let (g, s, t, k, tau) = (&inst.graph, inst.s, inst.t, inst.k, 2);
    let tree = extract_divider_strategy(g, s, t, k, tau)?;
    println!("{} nodes, height {}", tree.node_count(), tree.height());
    println!("root {} vs {:?}", tree.f, tree.d.agents());
    println!("verdict: {}", verify_strategy_tree(g, s, t, k, tau, &tree));

    let mut forged = tree.clone();
    if let Some(node) = forged.node_mut(1) {
        node.d = DivPlacement::new(vec![node.f.vertices()[0]]);
    }
    println!(
        "tampered: {}",
        verify_strategy_tree(g, s, t, k, tau, &forged)
    );
    Ok(())
}
