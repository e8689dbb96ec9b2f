//! Block-cycles: k blocks (paths of tau+1 nodes, each node holding
//! tau - 1 clocks) wired in a ring, realizing attractors of period
//! k(tau+1) at uniform delay tau.
//!
//!     cargo run --example block_cycles

use firemem::gadgets::{block_cycle_node_count, build_block_cycle, verify_claimed_period};

fn main() {
    println!("tau  k  nodes  claimed  measured  transient");
    for tau in 2..=5u32 {
        for k in 1..=4u32 {
            let g = build_block_cycle(tau, k).unwrap();
            assert_eq!(g.net.len(), block_cycle_node_count(tau, k));
            let v = verify_claimed_period(&g, 1 << 18).unwrap();
            println!(
                "{tau:>3} {k:>2}  {:>5}  {:>7}  {:>8}  {:>9}{}",
                g.net.len(),
                k * (tau + 1),
                v.measured,
                v.transient,
                if v.ok { "" } else { "  MISMATCH" }
            );
        }
    }

    // The six-path-node instance in detail: path states over one period.
    let g = build_block_cycle(2, 2).unwrap();
    let path: Vec<usize> = (0..6)
        .map(|i| {
            g.labels
                .iter()
                .position(|l| *l == format!("B_{}.path[{}]", i / 3, i % 3))
                .unwrap()
        })
        .collect();
    println!("\ntau=2, k=2 path orbit (period 6):");
    let mut s = g.initial.clone();
    for t in 0..=6 {
        let vals: String = path.iter().map(|&n| s.delta[n].to_string()).collect();
        println!("  t={t}: {}|{}", &vals[..3], &vals[3..]);
        s = g.net.step(&s);
    }
}
