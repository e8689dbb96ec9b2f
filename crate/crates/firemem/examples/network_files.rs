//! The on-disk formats: network JSON, state JSON and DOT export — the
//! same files the `firemem` binary reads and writes.
//!
//!     cargo run --example network_files

use firemem::gadgets::build_clock_network;
use firemem::net::{FmNetwork, FmState};

fn main() {
    let g = build_clock_network(2).unwrap();

    let network = serde_json::to_string_pretty(&g.network_json()).unwrap();
    println!("network.json (with gadget labels and period claim):\n{network}\n");

    let state = serde_json::to_string(&g.state_json()).unwrap();
    println!("state.json:\n{state}\n");

    // Round-trip through the plain network schema.
    let net: FmNetwork = serde_json::from_str(&network).unwrap();
    let s: FmState = serde_json::from_str(&state).unwrap();
    assert_eq!(net.step(&s).delta, vec![2, 0, 1]);

    println!("interaction graph (DOT):\n{}", g.to_dot());
}
