//! AND-prediction: does a node's boolean state ever leave its initial
//! value? Decided exactly by walking the trajectory to closure.
//!
//!     cargo run --example prediction

use firemem::dynamics::{predict, PredictionQuery};
use firemem::gadgets::build_clock_network;
use firemem::net::FmState;

fn main() {
    let g = build_clock_network(2).unwrap();

    // On the rotation orbit every node flips; node 0 starts at 0 and
    // fires one step later.
    for node in 0..3 {
        let q = PredictionQuery { net: &g.net, node, initial: g.initial.clone() };
        let p = predict(&q);
        println!(
            "from {} node {node}: answer {} witness {:?}",
            g.initial, p.answer, p.witness_time
        );
    }

    // A node that is 0 while its rule outputs 0 stays 0 in a symmetric
    // conjunctive network: prediction is settled by one evaluation.
    let s = FmState::new(vec![0, 0, 2]);
    let x = s.boolean_projection();
    for node in 0..3 {
        let fires = g.net.rules()[node].eval(&x);
        let q = PredictionQuery { net: &g.net, node, initial: s.clone() };
        let p = predict(&q);
        println!(
            "from {s} node {node}: x = {}, rule fires = {fires}, answer {} witness {:?}",
            x[node] as u8, p.answer, p.witness_time
        );
    }
}
