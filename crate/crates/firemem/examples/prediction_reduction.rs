//! The reduction from iterated-circuit prediction to network prediction:
//! compile the circuit, monitor the third path node of the relevant input
//! block, and compare the network's answer with the circuit's.
//!
//!     cargo run --example prediction_reduction

use firemem::circuit::{iter_circuit_predict, normalize_alternating, parse_circuit};
use firemem::compiler::reduce_prediction;

const SWAP: &str = include_str!("../data/circuits/swap2.txt");
const CYCLE_AND: &str = include_str!("../data/circuits/cycle_and3.txt");

fn main() {
    for (name, text) in [("swap2", SWAP), ("cycle_and3", CYCLE_AND)] {
        let c = parse_circuit(text).unwrap();
        let alt = normalize_alternating(&c);
        let n = c.n_inputs();
        println!("{name} ({n} inputs):");
        println!("  x0    i  circuit        network        monitored node");
        for mask in 0..1u32 << n {
            let x0: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            for i in 0..n {
                let inst = reduce_prediction(&alt, &x0, i).unwrap();
                let fm = inst.fm_predict();
                let circ = iter_circuit_predict(alt.circuit(), &x0, i);
                assert_eq!(fm.answer, circ.answer);
                println!(
                    "  {}  {i}  {:<13} {:<13} {} ({}{})",
                    x0.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>(),
                    format!("{} @ {:?}", circ.answer, circ.witness_time),
                    format!("{} @ {:?}", fm.answer, fm.witness_time),
                    inst.node,
                    inst.compiled.labels[inst.node],
                    if inst.extended { ", via auxiliary input" } else { "" },
                );
            }
        }
        println!();
    }
}
