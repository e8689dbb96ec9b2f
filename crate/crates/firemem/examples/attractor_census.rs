//! Exhaustive state-space census: every canonical state is assigned to
//! its attractor; the report lists periods, basin sizes and a canonical
//! representative per attractor.
//!
//!     cargo run --example attractor_census

use firemem::dynamics::brute_force_census;
use firemem::net::{complete_conjunctive, FmNetwork, LocalRule};

fn print_census(name: &str, net: &FmNetwork) {
    let total = net.state_space_size().unwrap();
    let rows = brute_force_census(net, 1 << 22).unwrap();
    println!("{name}: {} nodes, {total} canonical states, {} attractors", net.len(), rows.len());
    println!("  period  basin  representative");
    for row in &rows {
        println!(
            "  {:>6}  {:>5}  {:?}",
            row.period, row.basin, row.representative
        );
    }
    let covered: u64 = rows.iter().map(|r| r.basin).sum();
    assert_eq!(covered as u128, total);
    println!("  basins cover the whole space ({covered} states)\n");
}

fn main() {
    // The triangle clock: the rotation pair, the two homogeneous fixed
    // points, and how the remaining states drain into them.
    print_census("K_3, dt = 2", &complete_conjunctive(3, 2));

    // A small mixed conjunctive network with heterogeneous delays.
    let net = FmNetwork::new(
        vec![
            LocalRule::conjunctive(vec![1, 2]),
            LocalRule::conjunctive(vec![0]),
            LocalRule::conjunctive(vec![0, 3]),
            LocalRule::conjunctive(vec![2]),
        ],
        vec![2, 1, 3, 1],
    )
    .unwrap();
    print_census("4-node conjunctive chain, dt = [2,1,3,1]", &net);
}
