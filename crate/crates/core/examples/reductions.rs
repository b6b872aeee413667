//! Source problems and the games they map to, checked against brute force.

use rendezvous::forge::{
    evaluate_qbf_brute, reduce_qbf, reduce_set_cover, solve_set_cover_brute, Literal, QbfFormula,
    SetCoverInstance,
};
use rendezvous::game::facilitator_wins_in;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in 1..=2 {
        let sc = SetCoverInstance {
            n: 4,
            sets: vec![vec![0, 1], vec![2, 3], vec![1, 2]],
            k,
        };
        let inst = reduce_set_cover(&sc)?;
        let divider = !facilitator_wins_in(&inst.graph, inst.s, inst.t, inst.k, inst.tau.unwrap())?;
        println!(
            "set cover k={k}: cover exists = {}, game n={} agents={} divider survives = {divider}",
            solve_set_cover_brute(&sc)?,
            inst.graph.n(),
            inst.k
        );
    }
    let lit = |var, neg| Literal { var, neg };
    let phi = QbfFormula {
        n: 1,
        clauses: vec![
            vec![lit(1, false), lit(2, false)],
            vec![lit(1, true), lit(2, true)],
        ],
    };
    let inst = reduce_qbf(&phi)?;
    println!(
        "qbf: true = {}, game n={} m={} agents={} tau={:?}",
        evaluate_qbf_brute(&phi)?,
        inst.graph.n(),
        inst.graph.edge_count(),
        inst.k,
        inst.tau
    );
    Ok(())
}
