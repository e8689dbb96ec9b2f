//! Boolean networks with firing memory: network structure, state
//! representation and the synchronous update step.
//!
//! A network is a set of nodes, each with a boolean local rule over a list
//! of input nodes and a maximum delay `dt_i >= 1`. A state assigns each
//! node a single delay value `delta_i` in `[0, dt_i]` (shorthand form);
//! the boolean state of node `i` is `1` iff `delta_i >= 1`.
//!
//! One step works node-wise: evaluate the local rule on the current
//! boolean projection, then
//!
//! * rule fired (`1`): `delta_i` reloads to `dt_i`,
//! * rule silent (`0`): `delta_i` decrements toward `0` and stays there.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense node index in `[0, n)`.
pub type NodeId = usize;

/// The boolean function attached to a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleKind {
    /// AND over all inputs; the empty conjunction is `1`.
    Conjunctive,
    /// OR over some input; the empty disjunction is `0`.
    Disjunctive,
    /// `1` iff `sum(weights[j] * x[inputs[j]]) - theta >= 0`.
    Threshold { weights: Vec<i64>, theta: i64 },
}

/// Local rule: kind plus the ordered, duplicate-free input list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRule {
    pub kind: RuleKind,
    pub inputs: Vec<NodeId>,
}

impl LocalRule {
    pub fn conjunctive(inputs: Vec<NodeId>) -> Self {
        LocalRule { kind: RuleKind::Conjunctive, inputs }
    }

    pub fn disjunctive(inputs: Vec<NodeId>) -> Self {
        LocalRule { kind: RuleKind::Disjunctive, inputs }
    }

    pub fn threshold(inputs: Vec<NodeId>, weights: Vec<i64>, theta: i64) -> Self {
        LocalRule { kind: RuleKind::Threshold { weights, theta }, inputs }
    }

    /// Evaluate on a boolean configuration.
    pub fn eval(&self, x: &[bool]) -> bool {
        match &self.kind {
            RuleKind::Conjunctive => self.inputs.iter().all(|&j| x[j]),
            RuleKind::Disjunctive => self.inputs.iter().any(|&j| x[j]),
            RuleKind::Threshold { weights, theta } => {
                let s: i64 = self
                    .inputs
                    .iter()
                    .zip(weights)
                    .map(|(&j, &w)| if x[j] { w } else { 0 })
                    .sum();
                s - theta >= 0
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("rule list is empty")]
    EmptyNetwork,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("delay out of range at node {node}: dt must be >= 1")]
    DelayOutOfRange { node: NodeId },
    #[error("dangling node id {referenced} in rule of node {node}")]
    DanglingNodeId { node: NodeId, referenced: NodeId },
    #[error("duplicate input in rule of node {node}")]
    DuplicateInput { node: NodeId },
    #[error("delta out of range at node {node}: {value} > dt = {dt}")]
    DeltaOutOfRange { node: NodeId, value: u32, dt: u32 },
}

/// A boolean network with firing memory: rules plus per-node maximum delay.
///
/// Node `j` is an in-neighbor of `i` iff `j` appears in `rules[i].inputs`,
/// so the interaction graph is exactly the dependency graph of the rules.
/// Immutable after construction; `step` is a pure function, so states can
/// be advanced from many threads with no coordination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmNetwork {
    rules: Vec<LocalRule>,
    dt: Vec<u32>,
    /// Bit width of each node's delta in the packed key.
    bits: Vec<u32>,
    total_bits: u64,
}

impl FmNetwork {
    /// Validate and build a network. `rules` and `dt` must have equal
    /// nonzero length, every `dt_i >= 1`, every referenced node id in
    /// range, input lists duplicate-free, and threshold weight lists
    /// aligned with their inputs.
    pub fn new(rules: Vec<LocalRule>, dt: Vec<u32>) -> Result<Self, NetError> {
        if rules.is_empty() {
            return Err(NetError::EmptyNetwork);
        }
        if rules.len() != dt.len() {
            return Err(NetError::LengthMismatch(format!(
                "{} rules vs {} delays",
                rules.len(),
                dt.len()
            )));
        }
        let n = rules.len();
        for (i, rule) in rules.iter().enumerate() {
            if dt[i] < 1 {
                return Err(NetError::DelayOutOfRange { node: i });
            }
            let mut seen = vec![false; n];
            for &j in &rule.inputs {
                if j >= n {
                    return Err(NetError::DanglingNodeId { node: i, referenced: j });
                }
                if seen[j] {
                    return Err(NetError::DuplicateInput { node: i });
                }
                seen[j] = true;
            }
            if let RuleKind::Threshold { weights, .. } = &rule.kind {
                if weights.len() != rule.inputs.len() {
                    return Err(NetError::LengthMismatch(format!(
                        "node {i}: {} weights vs {} inputs",
                        weights.len(),
                        rule.inputs.len()
                    )));
                }
            }
        }
        let bits: Vec<u32> = dt.iter().map(|&d| 32 - d.leading_zeros()).collect();
        let total_bits = bits.iter().map(|&b| b as u64).sum();
        Ok(FmNetwork { rules, dt, bits, total_bits })
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[LocalRule] {
        &self.rules
    }

    pub fn dt(&self) -> &[u32] {
        &self.dt
    }

    /// Number of canonical shorthand states, `prod(dt_i + 1)`, or `None`
    /// on overflow.
    pub fn state_space_size(&self) -> Option<u128> {
        self.dt
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128 + 1))
    }

    /// Validate a delta vector against this network.
    pub fn check_state(&self, delta: &[u32]) -> Result<(), NetError> {
        if delta.len() != self.len() {
            return Err(NetError::LengthMismatch(format!(
                "{} deltas vs {} nodes",
                delta.len(),
                self.len()
            )));
        }
        for (i, (&v, &d)) in delta.iter().zip(&self.dt).enumerate() {
            if v > d {
                return Err(NetError::DeltaOutOfRange { node: i, value: v, dt: d });
            }
        }
        Ok(())
    }

    /// Build a canonical shorthand state from a boolean configuration and
    /// raw delay values: `x_i = 1` forces `delta_i >= 1`, `x_i = 0` forces
    /// `delta_i = 0`.
    pub fn canonicalize_initial(
        &self,
        x: &[bool],
        delta_raw: &[u32],
    ) -> Result<FmState, NetError> {
        if x.len() != self.len() || delta_raw.len() != self.len() {
            return Err(NetError::LengthMismatch(format!(
                "{} booleans / {} deltas vs {} nodes",
                x.len(),
                delta_raw.len(),
                self.len()
            )));
        }
        self.check_state(delta_raw)?;
        let delta = x
            .iter()
            .zip(delta_raw)
            .map(|(&xi, &di)| if xi { di.max(1) } else { 0 })
            .collect();
        Ok(FmState { delta })
    }

    /// One synchronous update step.
    pub fn step(&self, s: &FmState) -> FmState {
        debug_assert!(self.check_state(&s.delta).is_ok());
        let x = s.boolean_projection();
        let delta = self
            .rules
            .iter()
            .zip(&self.dt)
            .zip(&s.delta)
            .map(|((rule, &dt), &d)| if rule.eval(&x) { dt } else { d.saturating_sub(1) })
            .collect();
        FmState { delta }
    }

    /// In-place step variant for hot loops; `bools` is scratch space of
    /// length `n`.
    pub(crate) fn step_into(&self, cur: &[u32], next: &mut [u32], bools: &mut [bool]) {
        for (b, &d) in bools.iter_mut().zip(cur) {
            *b = d >= 1;
        }
        for i in 0..self.rules.len() {
            next[i] = if self.rules[i].eval(bools) {
                self.dt[i]
            } else {
                cur[i].saturating_sub(1)
            };
        }
    }

    /// Pack a state into a compact key for hashing and cycle detection:
    /// `ceil(log2(dt_i + 1))` bits per node, concatenated in node order.
    pub fn pack(&self, s: &FmState) -> PackedState {
        if self.total_bits <= 64 {
            let mut key = 0u64;
            let mut shift = 0;
            for (&v, &b) in s.delta.iter().zip(&self.bits) {
                key |= (v as u64) << shift;
                shift += b;
            }
            PackedState::Small(key)
        } else {
            let words = self.total_bits.div_ceil(64) as usize;
            let mut buf = vec![0u64; words];
            let mut pos = 0u64;
            for (&v, &b) in s.delta.iter().zip(&self.bits) {
                let word = (pos / 64) as usize;
                let off = pos % 64;
                buf[word] |= (v as u64) << off;
                let spill = (off + b as u64).saturating_sub(64);
                if spill > 0 {
                    buf[word + 1] |= (v as u64) >> (b as u64 - spill);
                }
                pos += b as u64;
            }
            PackedState::Big(buf.into_boxed_slice())
        }
    }

    /// DOT rendering of the interaction graph, node labels `i:dt_i`.
    /// `labels` optionally prepends a role name per node.
    pub fn to_dot(&self, labels: Option<&[String]>) -> String {
        let mut out = String::from("digraph fm {\n");
        for i in 0..self.len() {
            let base = format!("{}:{}", i, self.dt[i]);
            let label = match labels {
                Some(ls) => format!("{}\\n{}", ls[i], base),
                None => base,
            };
            out.push_str(&format!("  {} [label=\"{}\"];\n", i, label));
        }
        for (i, rule) in self.rules.iter().enumerate() {
            for &j in &rule.inputs {
                out.push_str(&format!("  {} -> {};\n", j, i));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Shorthand state: one delay value per node, `0 <= delta_i <= dt_i`.
/// Boolean projection: `x_i = 1` iff `delta_i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FmState {
    pub delta: Vec<u32>,
}

impl FmState {
    pub fn new(delta: Vec<u32>) -> Self {
        FmState { delta }
    }

    pub fn boolean_projection(&self) -> Vec<bool> {
        self.delta.iter().map(|&d| d >= 1).collect()
    }
}

impl fmt::Display for FmState {
    /// Digit-string rendering, e.g. `012`; nodes with
    /// delta > 9 are bracketed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.delta {
            if d > 9 {
                write!(f, "[{}]", d)?;
            } else {
                write!(f, "{}", d)?;
            }
        }
        Ok(())
    }
}

/// Compact hashable state key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PackedState {
    Small(u64),
    Big(Box<[u64]>),
}

// --- JSON wire format ----------------------------------------------------
//
// Network: {"n": int, "dt": [int], "rules": [{"kind": "and"|"or"|"threshold",
//           "inputs": [int], "weights": [int]?, "theta": int?}]}
// State:   {"delta": [int]}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    kind: String,
    inputs: Vec<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    n: usize,
    dt: Vec<u32>,
    rules: Vec<RuleJson>,
}

impl Serialize for FmNetwork {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rules = self
            .rules
            .iter()
            .map(|r| match &r.kind {
                RuleKind::Conjunctive => RuleJson {
                    kind: "and".into(),
                    inputs: r.inputs.clone(),
                    weights: None,
                    theta: None,
                },
                RuleKind::Disjunctive => RuleJson {
                    kind: "or".into(),
                    inputs: r.inputs.clone(),
                    weights: None,
                    theta: None,
                },
                RuleKind::Threshold { weights, theta } => RuleJson {
                    kind: "threshold".into(),
                    inputs: r.inputs.clone(),
                    weights: Some(weights.clone()),
                    theta: Some(*theta),
                },
            })
            .collect();
        NetworkJson { n: self.len(), dt: self.dt.clone(), rules }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FmNetwork {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = NetworkJson::deserialize(de)?;
        if raw.n != raw.rules.len() {
            return Err(D::Error::custom(format!(
                "field n = {} does not match {} rules",
                raw.n,
                raw.rules.len()
            )));
        }
        let mut rules = Vec::with_capacity(raw.rules.len());
        for (i, r) in raw.rules.into_iter().enumerate() {
            let kind = match r.kind.as_str() {
                "and" => RuleKind::Conjunctive,
                "or" => RuleKind::Disjunctive,
                "threshold" => RuleKind::Threshold {
                    weights: r
                        .weights
                        .ok_or_else(|| D::Error::custom(format!("node {i}: threshold rule without weights")))?,
                    theta: r
                        .theta
                        .ok_or_else(|| D::Error::custom(format!("node {i}: threshold rule without theta")))?,
                },
                other => {
                    return Err(D::Error::custom(format!("node {i}: unknown rule kind {other:?}")))
                }
            };
            rules.push(LocalRule { kind, inputs: r.inputs });
        }
        FmNetwork::new(rules, raw.dt).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    delta: Vec<u32>,
}

impl Serialize for FmState {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        StateJson { delta: self.delta.clone() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FmState {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Ok(FmState { delta: StateJson::deserialize(de)?.delta })
    }
}

/// Complete conjunctive graph `K_n` with uniform delay: every node's
/// inputs are all the other nodes. The building block of every gadget.
pub fn complete_conjunctive(n: usize, dt: u32) -> FmNetwork {
    let rules = (0..n)
        .map(|i| LocalRule::conjunctive((0..n).filter(|&j| j != i).collect()))
        .collect();
    FmNetwork::new(rules, vec![dt; n]).expect("complete graph is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> FmNetwork {
        complete_conjunctive(3, 2)
    }

    #[test]
    fn make_network_validates() {
        // K_3 with dt = [2,2,2] is the canonical valid example.
        assert_eq!(k3().len(), 3);

        // Empty input list is allowed; empty AND evaluates to 1.
        let net = FmNetwork::new(vec![LocalRule::conjunctive(vec![])], vec![1]).unwrap();
        assert!(net.rules()[0].eval(&[false]));
        let or = LocalRule::disjunctive(vec![]);
        assert!(!or.eval(&[false]));

        // dt = 0 is rejected.
        let err = FmNetwork::new(vec![LocalRule::conjunctive(vec![])], vec![0]);
        assert_eq!(err.unwrap_err(), NetError::DelayOutOfRange { node: 0 });

        let err = FmNetwork::new(vec![LocalRule::conjunctive(vec![1])], vec![1]);
        assert_eq!(err.unwrap_err(), NetError::DanglingNodeId { node: 0, referenced: 1 });

        let err = FmNetwork::new(
            vec![
                LocalRule::conjunctive(vec![1, 1]),
                LocalRule::conjunctive(vec![0]),
            ],
            vec![1, 1],
        );
        assert_eq!(err.unwrap_err(), NetError::DuplicateInput { node: 0 });

        let err = FmNetwork::new(vec![LocalRule::conjunctive(vec![])], vec![1, 1]);
        assert!(matches!(err.unwrap_err(), NetError::LengthMismatch(_)));

        let err = FmNetwork::new(
            vec![LocalRule::threshold(vec![0], vec![1, 1], 0)],
            vec![1],
        );
        assert!(matches!(err.unwrap_err(), NetError::LengthMismatch(_)));
    }

    #[test]
    fn boolean_projection_reads_shorthand() {
        let s = FmState::new(vec![0, 1, 2]);
        assert_eq!(s.boolean_projection(), vec![false, true, true]);
        assert_eq!(FmState::new(vec![0, 0, 0]).boolean_projection(), vec![false; 3]);
        assert_eq!(FmState::new(vec![2, 2, 2]).boolean_projection(), vec![true; 3]);
    }

    #[test]
    fn step_matches_figure_rotations() {
        // 012 -> 201 on K_3 with dt = 2.
        let net = k3();
        let s = FmState::new(vec![0, 1, 2]);
        assert_eq!(net.step(&s).delta, vec![2, 0, 1]);

        // 0123 -> 3012 on K_4 with dt = 3.
        let net4 = complete_conjunctive(4, 3);
        let s4 = FmState::new(vec![0, 1, 2, 3]);
        assert_eq!(net4.step(&s4).delta, vec![3, 0, 1, 2]);
    }

    #[test]
    fn all_firing_conjunctive_is_fixed() {
        let net = k3();
        let s = FmState::new(vec![2, 2, 2]);
        assert_eq!(net.step(&s), s);
    }

    #[test]
    fn canonicalize_rules() {
        let net = k3();
        let s = net
            .canonicalize_initial(&[false, true, true], &[0, 1, 2])
            .unwrap();
        assert_eq!(s.delta, vec![0, 1, 2]);

        let one = FmNetwork::new(vec![LocalRule::conjunctive(vec![])], vec![2]).unwrap();
        // x = 1 forces delta >= 1.
        assert_eq!(one.canonicalize_initial(&[true], &[0]).unwrap().delta, vec![1]);
        // x = 0 forces delta = 0.
        assert_eq!(one.canonicalize_initial(&[false], &[2]).unwrap().delta, vec![0]);
        // raw delta above dt is rejected.
        let err = one.canonicalize_initial(&[true], &[3]);
        assert_eq!(
            err.unwrap_err(),
            NetError::DeltaOutOfRange { node: 0, value: 3, dt: 2 }
        );
    }

    #[test]
    fn threshold_rule_eval() {
        // x0 + x1 - 2 >= 0: an AND in threshold form.
        let r = LocalRule::threshold(vec![0, 1], vec![1, 1], 2);
        assert!(r.eval(&[true, true]));
        assert!(!r.eval(&[true, false]));
    }

    #[test]
    fn packing_roundtrip_distinguishes_states() {
        let net = complete_conjunctive(3, 2);
        let a = net.pack(&FmState::new(vec![0, 1, 2]));
        let b = net.pack(&FmState::new(vec![1, 0, 2]));
        assert_ne!(a, b);
        assert_eq!(a, net.pack(&FmState::new(vec![0, 1, 2])));

        // Wide network exercises the multi-word path.
        let wide = complete_conjunctive(40, 6);
        let s1 = FmState::new((0..40).map(|i| (i % 7) as u32).collect());
        let mut d2 = s1.delta.clone();
        d2[39] = (d2[39] + 1) % 7;
        let s2 = FmState::new(d2);
        assert_ne!(wide.pack(&s1), wide.pack(&s2));
        assert_eq!(wide.pack(&s1), wide.pack(&s1.clone()));
    }

    #[test]
    fn dot_export_mentions_every_node() {
        let dot = k3().to_dot(None);
        assert!(dot.contains("0 [label=\"0:2\"]"));
        assert!(dot.contains("1 -> 0"));
    }

    /// Differential oracle: the explicit (x, delta) pair dynamics from the
    /// two displayed update equations, kept independent of `step`.
    mod pair_oracle {
        use super::*;

        #[derive(Clone, Debug, PartialEq)]
        pub struct Pair {
            pub x: Vec<bool>,
            pub delta: Vec<u32>,
        }

        pub fn pair_step(net: &FmNetwork, p: &Pair) -> Pair {
            let n = net.len();
            let mut nx = vec![false; n];
            let mut nd = vec![0u32; n];
            for i in 0..n {
                let f = net.rules()[i].eval(&p.x);
                nd[i] = if f {
                    net.dt()[i]
                } else if p.delta[i] >= 1 {
                    p.delta[i] - 1
                } else {
                    0
                };
                nx[i] = if nd[i] >= 1 { true } else { f };
            }
            Pair { x: nx, delta: nd }
        }
    }

    #[test]
    fn shorthand_agrees_with_pair_dynamics() {
        use pair_oracle::*;

        // Arbitrary (possibly inconsistent) initial pairs: after a single
        // pair step the pair is consistent, and from there the shorthand
        // dynamics must track it exactly.
        let mut seed = 0x5eed_1234_u64;
        let mut rand = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as u32
        };

        for _ in 0..200 {
            let n = 2 + (rand() % 5) as usize;
            let rules: Vec<LocalRule> = (0..n)
                .map(|i| {
                    let mut inputs: Vec<NodeId> =
                        (0..n).filter(|_| rand() % 2 == 0).collect();
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
            let net = FmNetwork::new(rules, dt.clone()).unwrap();

            let x: Vec<bool> = (0..n).map(|_| rand() % 2 == 0).collect();
            let delta: Vec<u32> = (0..n).map(|i| rand() % (dt[i] + 1)).collect();

            let mut pair = pair_step(&net, &pair_oracle::Pair { x, delta });
            // Consistency established after one step.
            for i in 0..n {
                assert_eq!(pair.x[i], pair.delta[i] >= 1);
            }
            let mut s = FmState::new(pair.delta.clone());
            for _ in 0..20 {
                pair = pair_step(&net, &pair);
                s = net.step(&s);
                assert_eq!(s.delta, pair.delta);
                assert_eq!(s.boolean_projection(), pair.x);
            }
        }
    }

    #[test]
    fn dt_one_degenerates_to_plain_update() {
        // With dt = 1 everywhere the boolean projection of one step equals
        // the classic synchronous update, for every state.
        let mut seed = 0xfeed_u64;
        let mut rand = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as u32
        };
        for _ in 0..50 {
            let n = 1 + (rand() % 10) as usize;
            let rules: Vec<LocalRule> = (0..n)
                .map(|_| {
                    let inputs: Vec<NodeId> = (0..n).filter(|_| rand() % 3 == 0).collect();
                    match rand() % 3 {
                        0 => LocalRule::conjunctive(inputs),
                        1 => LocalRule::disjunctive(inputs),
                        _ => {
                            let w: Vec<i64> =
                                inputs.iter().map(|_| (rand() % 5) as i64 - 2).collect();
                            let theta = (rand() % 3) as i64 - 1;
                            LocalRule::threshold(inputs, w, theta)
                        }
                    }
                })
                .collect();
            let net = FmNetwork::new(rules, vec![1; n]).unwrap();
            for mask in 0u32..(1 << n) {
                let x: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                let s = net
                    .canonicalize_initial(&x, &x.iter().map(|&b| b as u32).collect::<Vec<_>>())
                    .unwrap();
                let plain: Vec<bool> = net.rules().iter().map(|r| r.eval(&x)).collect();
                assert_eq!(net.step(&s).boolean_projection(), plain);
            }
        }
    }

    #[test]
    fn json_roundtrip_exact_keys() {
        let net = FmNetwork::new(
            vec![
                LocalRule::conjunctive(vec![1]),
                LocalRule::threshold(vec![0], vec![2], 1),
            ],
            vec![2, 1],
        )
        .unwrap();
        let js = serde_json::to_value(&net).unwrap();
        assert_eq!(js["n"], 2);
        assert_eq!(js["dt"], serde_json::json!([2, 1]));
        assert_eq!(js["rules"][0]["kind"], "and");
        assert_eq!(js["rules"][1]["kind"], "threshold");
        assert_eq!(js["rules"][1]["weights"], serde_json::json!([2]));
        assert_eq!(js["rules"][1]["theta"], 1);
        assert!(js["rules"][0].get("weights").is_none());
        let back: FmNetwork = serde_json::from_value(js).unwrap();
        assert_eq!(back, net);

        let s = FmState::new(vec![0, 1]);
        let js = serde_json::to_value(&s).unwrap();
        assert_eq!(js, serde_json::json!({"delta": [0, 1]}));
    }

    #[test]
    fn invalid_json_is_rejected() {
        // n mismatch
        let bad = serde_json::json!({"n": 3, "dt": [1], "rules": [{"kind": "and", "inputs": []}]});
        assert!(serde_json::from_value::<FmNetwork>(bad).is_err());
        // dt = 0 travels through the same validation as make_network
        let bad = serde_json::json!({"n": 1, "dt": [0], "rules": [{"kind": "and", "inputs": []}]});
        assert!(serde_json::from_value::<FmNetwork>(bad).is_err());
    }
}
