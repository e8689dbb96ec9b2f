//! Prime-union networks: chains of components with pairwise different
//! rotation periods, whose global period is the lcm of the component
//! periods — the bounded-size route to non-polynomial attractors.
//!
//! Also demonstrates why the connector matters: joining two components by
//! a bare conjunctive edge collapses the downstream rotation as soon as
//! both connector nodes need to be 0 at a common instant (guaranteed for
//! coprime periods), while a buffered relay link never blocks.
//!
//!     cargo run --example prime_unions

use firemem::dynamics::find_attractor;
use firemem::gadgets::{
    build_prime_union_hetero_with, build_prime_union_uniform, verify_claimed_period,
    ConnectorStyle, HeteroOptions,
};

fn main() {
    let tables: &[&[u64]] = &[&[2, 3], &[2, 3, 5], &[2, 3, 5, 7]];

    println!("heterogeneous delays (components K_{{p+1}}, delay p, buffered links):");
    println!("primes            nodes  claimed  measured  transient");
    for primes in tables {
        let g = build_prime_union_hetero_with(primes, HeteroOptions::default()).unwrap();
        let v = verify_claimed_period(&g, 1 << 20).unwrap();
        println!(
            "{:<16}  {:>5}  {:>7}  {:>8}  {:>9}{}",
            format!("{primes:?}"),
            g.net.len(),
            g.claimed_period,
            v.measured,
            v.transient,
            if v.ok { "" } else { "  MISMATCH" }
        );
    }

    println!("\nsame components sized K_p with delay p-1 (period exactly p):");
    println!("primes            nodes  product  measured");
    for primes in tables {
        let g = build_prime_union_hetero_with(
            primes,
            HeteroOptions { coprime_fix: true, ..Default::default() },
        )
        .unwrap();
        let v = verify_claimed_period(&g, 1 << 20).unwrap();
        let product: u64 = primes.iter().product();
        println!(
            "{:<16}  {:>5}  {:>7}  {:>8}{}",
            format!("{primes:?}"),
            g.net.len(),
            product,
            v.measured,
            if v.ok { "" } else { "  MISMATCH" }
        );
    }

    println!("\nuniform delay tau = 2 (components are block-cycles, clock-to-clock links):");
    println!("primes            nodes  claimed  measured  transient");
    for primes in tables {
        let g = build_prime_union_uniform(2, primes).unwrap();
        let v = verify_claimed_period(&g, 1 << 20).unwrap();
        println!(
            "{:<16}  {:>5}  {:>7}  {:>8}  {:>9}{}",
            format!("{primes:?}"),
            g.net.len(),
            g.claimed_period,
            v.measured,
            v.transient,
            if v.ok { "" } else { "  MISMATCH" }
        );
    }

    // The failure mode of the bare edge: K_3 (period 3) watching K_4
    // (period 4). The connector vertex of K_3 must refire at its zero
    // instants, but 3 and 4 are coprime, so eventually K_4's vertex is 0
    // at exactly that moment; the blocked firing drains K_3 to all-zeros
    // and only the free K_4 rotation survives.
    println!("\nbare-edge connector on [2, 3] (kept as a demonstration):");
    let g = build_prime_union_hetero_with(
        &[2, 3],
        HeteroOptions { connector: ConnectorStyle::DirectEdge, ..Default::default() },
    )
    .unwrap();
    let t = find_attractor(&g.net, &g.initial, 1 << 16).unwrap();
    println!(
        "  claimed {:?}, reached an attractor of period {} after a transient of {}",
        g.claimed_period, t.period, t.transient
    );
    let k3: Vec<usize> = g.components[0].clone();
    let dead = t.states[t.transient..]
        .iter()
        .all(|s| k3.iter().all(|&n| s.delta[n] == 0));
    println!("  K_3 component all-zero on the surviving attractor: {dead}");
}
