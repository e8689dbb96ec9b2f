//! The two gate gadgets in isolation: truth tables over encoded inputs
//! and the measured settle times.
//!
//! A "1" travels as a missing firing (a 0 crossing one block every three
//! steps). The OR joins two blocks straight into its output block; the
//! AND delays its inputs by one relay step relative to each other so that
//! only a double pulse drains the clock-less junction to zero.
//!
//!     cargo run --example gate_gadgets

use firemem::circuit::GateKind;
use firemem::compiler::{gate_fixture, wire_code};

fn main() {
    for kind in [GateKind::Or, GateKind::And] {
        let f = gate_fixture(kind);
        println!(
            "{kind:?} gadget: {} nodes, {} undirected edges",
            f.net.len(),
            f.edge_count()
        );
        let settle = f.measure_settle(30).expect("gadget settles");
        println!("  settle time: {settle} steps");
        for mask in 0..4u32 {
            let a = mask & 1 == 1;
            let b = mask >> 1 & 1 == 1;
            let expected = match kind {
                GateKind::And => a && b,
                GateKind::Or => a || b,
            };
            let mut s = f.encode(a, b);
            for _ in 0..settle {
                s = f.net.step(&s);
            }
            let out = [
                s.delta[f.output[0]],
                s.delta[f.output[1]],
                s.delta[f.output[2]],
            ];
            println!(
                "  {}{} -> {:?} (code for {}), machinery at rest: {}",
                a as u8,
                b as u8,
                out,
                expected as u8,
                f.is_settled(&s, expected)
            );
            assert_eq!(out, wire_code(expected));
        }
        println!();
    }
}
