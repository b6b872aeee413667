//! Optimal self-play on the clique spider, printing the ranked options
//! at every turn.

use rendezvous::forge::clique_spider;
use rendezvous::game::{best_moves, FacPlacement, Move, Position, Turn, WinTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = clique_spider(3)?;
    let g = &inst.graph;
    for k in [1, 2] {
        let table = WinTable::build(g, k, u128::MAX)?;
        let f = FacPlacement::new(inst.s, inst.t);
        let opening = table
            .initial_placements(inst.s, inst.t)
            .into_iter()
            .max_by_key(|d| (table.level(&f, d), std::cmp::Reverse(d.clone())))
            .expect("free vertices exist");
        let mut pos = Position::new(f, opening, Turn::Facilitator);
        println!("k={k}: Divider opens on {:?}", pos.d.agents());
        for _ in 0..6 {
            let hints = best_moves(g, &table, &pos);
            let Some(top) = hints.first() else { break };
            let shown: Vec<String> = hints
                .iter()
                .take(3)
                .map(|h| serde_json::to_string(h).unwrap())
                .collect();
            println!("  {:?} to move: {}", pos.turn, shown.join(" "));
            pos = match &top.mv {
                Move::Facilitator(f2) => Position::new(*f2, pos.d, Turn::Divider),
                Move::Divider(d2) => Position::new(pos.f, d2.clone(), Turn::Facilitator),
            };
            if pos.f.is_meeting() {
                println!("  met at {}", pos.f);
                break;
            }
        }
    }
    Ok(())
}
