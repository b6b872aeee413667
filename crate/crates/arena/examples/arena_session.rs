//! A scripted game against the engine without the HTTP layer.

use rendezvous::forge::clique_spider;
use rendezvous_arena::{Action, Arena, Config, Role};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arena = Arena::new(Config::default())?;
    let mut inst = clique_spider(3)?;
    inst.k = 1;
    let (id, state) = arena.create(inst, Role::Facilitator)?;
    println!("{}", serde_json::to_string(&state)?);
    arena.with_session(&id, |s| {
        while s.status() == rendezvous_arena::Status::InProgress {
            let hint = s.hints().remove(0);
            println!("play {hint}");
            let pair: [usize; 2] =
                serde_json::from_value(hint["pair"].clone()).expect("facilitator hint");
            s.submit(Action::Pair { pair })?;
            println!("{}", serde_json::to_string(&s.state()).expect("state"));
        }
        Ok(())
    })?;
    Ok(())
}
