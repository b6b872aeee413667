//! The neighborhood-diversity algorithm on a graph with few modules but
//! many vertices, next to the generic search.

use std::time::Instant;

use rendezvous::game::facilitator_wins_in;
use rendezvous::nd::{
    blow_up, divider_wins_in_time_nd_report, neighborhood_decomposition, ModuleKind, NdConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use ModuleKind::{Clique, Independent};
    let kinds = [Independent, Clique, Independent, Clique];
    let g = blow_up(&[1, 3, 4, 1], &kinds, &[(0, 1), (1, 2), (2, 3)]);
    let nd = neighborhood_decomposition(&g);
    println!("n={} modules={} sizes={:?}", g.n(), nd.ell(), nd.sizes());
    let (s, t) = (nd.modules[0][0], nd.modules[3][0]);
    for k in 1..=3 {
        for tau in 1..=3 {
            let start = Instant::now();
            let rep = divider_wins_in_time_nd_report(&g, s, t, k, tau, &NdConfig::default())?;
            let nd_time = start.elapsed();
            let start = Instant::now();
            let generic = !facilitator_wins_in(&g, s, t, k, tau)?;
            assert_eq!(rep.divider_wins, generic);
            println!(
                "k={k} tau={tau}: {rep} ({nd_time:?} vs generic {:?})",
                start.elapsed()
            );
        }
    }
    Ok(())
}
