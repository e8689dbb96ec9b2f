//! Cross-module property suites: invariants that hold for whole families
//! of networks, checked over random and exhaustive samples.

use std::collections::HashMap;

use proptest::prelude::*;

use firemem::circuit::{normalize_alternating, validate_alternating, Gate, GateKind, MonotoneCircuit, Ref};
use firemem::dynamics::{brute_force_census, find_attractor, predict, PredictionQuery};
use firemem::net::{FmNetwork, FmState, LocalRule, NodeId, RuleKind};

fn undirected_conjunctive(n: usize, edges: &[(usize, usize)], dt: &[u32]) -> FmNetwork {
    let mut inputs: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for &(i, j) in edges {
        inputs[i].push(j);
        inputs[j].push(i);
    }
    let rules = inputs
        .into_iter()
        .map(|mut ins| {
            ins.sort_unstable();
            ins.dedup();
            LocalRule::conjunctive(ins)
        })
        .collect();
    FmNetwork::new(rules, dt.to_vec()).unwrap()
}

/// The one-step remark for symmetric conjunctive networks: a node that is
/// 0 while its rule outputs 0 shares a 0 with some neighbor, the two hold
/// each other down, and the node stays 0 on the whole trajectory.
#[test]
fn conjunctive_absorption_on_symmetric_networks() {
    let mut seed = 0xab50_u64;
    let mut rand = move || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 33) as u32
    };
    for _ in 0..120 {
        let n = 2 + (rand() % 4) as usize;
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|_| rand() % 2 == 0)
            .collect();
        let dt: Vec<u32> = (0..n).map(|_| 1 + rand() % 3).collect();
        let net = undirected_conjunctive(n, &edges, &dt);

        // every canonical state, every node with x_i = 0 and F_i(x) = 0
        let mut delta = vec![0u32; n];
        loop {
            let s0 = FmState::new(delta.clone());
            let x = s0.boolean_projection();
            let t = find_attractor(&net, &s0, 1 << 14).unwrap();
            for i in 0..n {
                if !x[i] && !net.rules()[i].eval(&x) {
                    for (step, s) in t.states.iter().enumerate() {
                        assert_eq!(
                            s.delta[i], 0,
                            "node {i} revived at step {step} from {s0}"
                        );
                    }
                    let q = PredictionQuery { net: &net, node: i, initial: s0.clone() };
                    assert!(!predict(&q).answer);
                }
            }
            let mut done = true;
            for i in 0..n {
                if delta[i] < dt[i] {
                    delta[i] += 1;
                    done = false;
                    break;
                }
                delta[i] = 0;
            }
            if done {
                break;
            }
        }
    }
}

/// Census partition: basin sizes sum to the number of canonical states.
#[test]
fn census_partitions_state_space() {
    let mut seed = 0xce5u64;
    let mut rand = move || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 33) as u32
    };
    for _ in 0..40 {
        let n = 2 + (rand() % 4) as usize;
        let rules: Vec<LocalRule> = (0..n)
            .map(|i| {
                let mut inputs: Vec<NodeId> = (0..n).filter(|_| rand() % 2 == 0).collect();
                if inputs.is_empty() {
                    inputs.push((i + 1) % n);
                }
                if rand() % 2 == 0 {
                    LocalRule::conjunctive(inputs)
                } else {
                    LocalRule::disjunctive(inputs)
                }
            })
            .collect();
        let dt: Vec<u32> = (0..n).map(|_| 1 + rand() % 3).collect();
        let net = FmNetwork::new(rules, dt).unwrap();
        let total = net.state_space_size().unwrap() as u64;
        let rows = brute_force_census(&net, 1 << 20).unwrap();
        assert_eq!(rows.iter().map(|r| r.basin).sum::<u64>(), total);
        // each representative really lies on a cycle of its period
        for row in rows {
            let s = FmState::new(row.representative);
            let t = find_attractor(&net, &s, 1 << 16).unwrap();
            assert_eq!((t.transient, t.period), (0, row.period));
        }
    }
}

/// dt = 1 everywhere with classic AND dynamics: the census agrees with a
/// plain boolean simulator on attractor count, periods and basins.
#[test]
fn dt1_census_matches_classic_simulator() {
    let mut seed = 0xc1a551c_u64;
    let mut rand = move || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 33) as u32
    };
    for _ in 0..40 {
        let n = 2 + (rand() % 5) as usize;
        let inputs: Vec<Vec<NodeId>> = (0..n)
            .map(|i| {
                let mut ins: Vec<NodeId> = (0..n).filter(|_| rand() % 2 == 0).collect();
                if ins.is_empty() {
                    ins.push((i + 1) % n);
                }
                ins
            })
            .collect();
        let rules = inputs.iter().cloned().map(LocalRule::conjunctive).collect();
        let net = FmNetwork::new(rules, vec![1; n]).unwrap();
        let fm = brute_force_census(&net, 1 << 20).unwrap();

        // classic parallel dynamics over bitmasks
        let step = |x: u64| -> u64 {
            let mut y = 0;
            for i in 0..n {
                if inputs[i].iter().all(|&j| x >> j & 1 == 1) {
                    y |= 1 << i;
                }
            }
            y
        };
        let mut basins: HashMap<u64, (usize, u64)> = HashMap::new();
        for start in 0..1u64 << n {
            let mut cur = start;
            let mut seen = HashMap::new();
            let mut t = 0usize;
            let first = loop {
                if let Some(&f) = seen.get(&cur) {
                    break f;
                }
                seen.insert(cur, t);
                cur = step(cur);
                t += 1;
            };
            let period = t - first;
            let mut rep = cur;
            let mut probe = step(cur);
            while probe != cur {
                rep = rep.min(probe);
                probe = step(probe);
            }
            let e = basins.entry(rep).or_insert((period, 0));
            e.1 += 1;
        }
        let mut classic: Vec<(usize, u64)> = basins.into_values().collect();
        classic.sort_unstable();
        let mut fm_rows: Vec<(usize, u64)> = fm.iter().map(|r| (r.period, r.basin)).collect();
        fm_rows.sort_unstable();
        assert_eq!(fm_rows, classic);
    }
}

// --- proptest invariants ----------------------------------------------------

fn arb_network() -> impl Strategy<Value = FmNetwork> {
    (2usize..7)
        .prop_flat_map(|n| {
            let rule = (
                prop::collection::vec(0usize..n, 1..=n),
                prop::bool::ANY,
            );
            (
                prop::collection::vec(rule, n),
                prop::collection::vec(1u32..4, n),
            )
        })
        .prop_map(|(raw, dt)| {
            let rules = raw
                .into_iter()
                .map(|(mut inputs, conj)| {
                    inputs.sort_unstable();
                    inputs.dedup();
                    if conj {
                        LocalRule::conjunctive(inputs)
                    } else {
                        LocalRule::disjunctive(inputs)
                    }
                })
                .collect();
            FmNetwork::new(rules, dt).unwrap()
        })
}

proptest! {
    /// Stepping never leaves the canonical delta range.
    #[test]
    fn step_stays_in_range(net in arb_network(), seed in 0u64..u64::MAX) {
        let mut state = seed;
        let delta: Vec<u32> = net.dt().iter().map(|&d| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as u32 % (d + 1)
        }).collect();
        let mut s = FmState::new(delta);
        for _ in 0..12 {
            s = net.step(&s);
            prop_assert!(net.check_state(&s.delta).is_ok());
        }
    }

    /// Packing is injective along trajectories: equal keys mean equal states.
    #[test]
    fn packing_is_injective_on_orbit(net in arb_network(), seed in 0u64..u64::MAX) {
        let mut state = seed;
        let delta: Vec<u32> = net.dt().iter().map(|&d| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as u32 % (d + 1)
        }).collect();
        let mut s = FmState::new(delta);
        let mut seen: HashMap<firemem::net::PackedState, FmState> = HashMap::new();
        for _ in 0..40 {
            if let Some(prev) = seen.insert(net.pack(&s), s.clone()) {
                prop_assert_eq!(prev, s.clone());
            }
            s = net.step(&s);
        }
    }

    /// Network JSON round-trips losslessly.
    #[test]
    fn network_json_roundtrip(net in arb_network()) {
        let text = serde_json::to_string(&net).unwrap();
        let back: FmNetwork = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(net, back);
    }
}

fn arb_circuit() -> impl Strategy<Value = MonotoneCircuit> {
    (1usize..5, 1usize..8).prop_flat_map(|(n, g)| {
        let argpool = n + g;
        let gates = prop::collection::vec(
            (prop::bool::ANY, prop::collection::vec(0usize..argpool, 1..=2)),
            g,
        );
        let outputs = prop::collection::vec(0usize..argpool, n);
        (Just(n), gates, outputs).prop_map(|(n, gates_raw, outs_raw)| {
            let clamp = |r: usize, limit: usize| -> Ref {
                if r < n {
                    Ref::Input(r)
                } else {
                    // only reference earlier gates to keep the graph acyclic
                    Ref::Gate((r - n) % limit.max(1))
                }
            };
            let gates: Vec<Gate> = gates_raw
                .into_iter()
                .enumerate()
                .map(|(gi, (conj, args))| Gate {
                    kind: if conj { GateKind::And } else { GateKind::Or },
                    args: args
                        .into_iter()
                        .map(|r| if gi == 0 { Ref::Input(r % n) } else { clamp(r, gi) })
                        .collect(),
                })
                .collect();
            let total = gates.len();
            let outputs = outs_raw
                .into_iter()
                .map(|r| clamp(r, total))
                .collect();
            MonotoneCircuit::new(n, gates, outputs, None).unwrap()
        })
    })
}

proptest! {
    /// Normalization emits a valid alternating circuit that computes the
    /// same function.
    #[test]
    fn normalization_preserves_semantics(c in arb_circuit()) {
        let norm = normalize_alternating(&c);
        prop_assert_eq!(validate_alternating(norm.circuit()), Ok(()));
        let n = c.n_inputs();
        for mask in 0..1u64 << n {
            let x: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            prop_assert_eq!(norm.circuit().eval(&x), c.eval(&x));
        }
    }
}

/// Above the exhaustive range, normalization equivalence is checked on
/// sampled inputs: a 12-input circuit against ten thousand vectors.
#[test]
fn normalization_equivalence_sampled_wide() {
    let mut seed = 0x_12de_u64;
    let mut rand = move || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 33) as u32
    };
    let n = 12;
    let n_gates = 24;
    let mut gates = Vec::new();
    for gi in 0..n_gates {
        let pool = n + gi;
        let kind = if rand() % 2 == 0 { GateKind::And } else { GateKind::Or };
        let nargs = 1 + (rand() % 2) as usize;
        let args = (0..nargs)
            .map(|_| {
                let r = (rand() % pool as u32) as usize;
                if r < n {
                    Ref::Input(r)
                } else {
                    Ref::Gate(r - n)
                }
            })
            .collect();
        gates.push(Gate { kind, args });
    }
    let outputs = (0..n)
        .map(|_| Ref::Gate((rand() % n_gates as u32) as usize))
        .collect();
    let c = MonotoneCircuit::new(n, gates, outputs, None).unwrap();
    let norm = normalize_alternating(&c);
    assert_eq!(validate_alternating(norm.circuit()), Ok(()));
    for _ in 0..10_000 {
        let x: Vec<bool> = (0..n).map(|_| rand() % 2 == 1).collect();
        assert_eq!(norm.circuit().eval(&x), c.eval(&x));
    }
}

/// Compiled networks are structurally uniform: conjunctive everywhere
/// with delay 2.
#[test]
fn compiled_networks_are_uniform() {
    for text in [
        include_str!("../data/circuits/or2.txt"),
        include_str!("../data/circuits/maj3.txt"),
        include_str!("../data/circuits/cycle_and3.txt"),
    ] {
        let c = firemem::circuit::parse_circuit(text).unwrap();
        let cc = firemem::compiler::compile(&normalize_alternating(&c)).unwrap();
        assert!(cc.net.dt().iter().all(|&d| d == 2));
        assert!(cc.net.rules().iter().all(|r| r.kind == RuleKind::Conjunctive));
    }
}
