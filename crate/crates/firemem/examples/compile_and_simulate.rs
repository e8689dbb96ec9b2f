//! Compile a monotone circuit to a conjunctive delay-2 network and watch
//! the network carry out circuit iterations: after `p` steps per
//! iteration, decoding the input blocks reproduces `C^t(x)` exactly.
//!
//!     cargo run --example compile_and_simulate

use firemem::circuit::{normalize_alternating, parse_circuit};
use firemem::compiler::{compile, decode, encode, simulate_iterations};

const MAJ3: &str = include_str!("../data/circuits/maj3.txt");

fn main() {
    let c = parse_circuit(MAJ3).unwrap();
    let alt = normalize_alternating(&c);
    let cc = compile(&alt).unwrap();
    println!(
        "majority-of-3: {} gates after normalization, {} network nodes, p = {} steps/iteration",
        alt.circuit().gates().len(),
        cc.net.len(),
        cc.p
    );

    // One iteration for every input, decoded from the network.
    println!("\nx    C(x)   network");
    for mask in 0..8u32 {
        let x: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
        let want = alt.circuit().eval(&x);
        let got = simulate_iterations(&cc, &x, 1).unwrap();
        let fmt = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        println!("{}  {}    {}", fmt(&x), fmt(&want), fmt(&got));
        assert_eq!(got, want);
    }

    // Deeper iteration, step by step on the same network state.
    let x0 = vec![true, false, true];
    let mut s = encode(&cc, &x0);
    let mut want = x0.clone();
    println!("\niterating from 101:");
    for t in 1..=5 {
        for _ in 0..cc.p {
            s = cc.net.step(&s);
        }
        want = alt.circuit().eval(&want);
        let got = decode(&cc, &s).unwrap();
        println!("  t={t}: {}", got.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>());
        assert_eq!(got, want);
    }
}
