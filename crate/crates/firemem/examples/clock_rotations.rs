//! Clocks: complete conjunctive graphs K_{tau+1} with delay tau whose
//! rotation orbit has period tau + 1.
//!
//!     cargo run --example clock_rotations

use firemem::gadgets::{build_clock_network, verify_claimed_period};

fn main() {
    // The two smallest clocks, traced step by step.
    for tau in [2u32, 3] {
        let g = build_clock_network(tau).unwrap();
        println!("K_{} with dt = {tau} from {}:", tau + 1, g.initial);
        let mut s = g.initial.clone();
        for _ in 0..=tau {
            let next = g.net.step(&s);
            println!("  {s} -> {next}");
            s = next;
        }
        println!();
    }

    // Period claims measured for the whole family.
    println!("tau  nodes  claimed  measured  transient");
    for tau in 2..=8 {
        let g = build_clock_network(tau).unwrap();
        let v = verify_claimed_period(&g, 1 << 16).unwrap();
        println!(
            "{tau:>3}  {:>5}  {:>7}  {:>8}  {:>9}{}",
            g.net.len(),
            tau + 1,
            v.measured,
            v.transient,
            if v.ok { "" } else { "  MISMATCH" }
        );
    }
}
