//! Gadget constructions: clocks, blocks, block-cycles and prime-union
//! networks, each bundled with the initial condition that realizes its
//! period claim and a verifier that measures the claim by simulation.
//!
//! All gadget rules are conjunctive. Within clocks, blocks and complete
//! components the interaction graph is symmetric (every edge is a mutual
//! dependency); only inter-component connectors are one-way.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::dynamics::{find_attractor, DynError};
use crate::net::{FmNetwork, FmState, LocalRule, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("tau must be >= 2, got {0}")]
    TauTooSmall(u32),
    #[error("k must be >= 1, got {0}")]
    KTooSmall(u32),
    #[error("prime list is empty")]
    EmptyList,
    #[error("primes must be distinct")]
    NonDistinctPrimes,
    #[error("prime {0} is too small, must be >= 2")]
    PrimeTooSmall(u64),
}

/// Period claim carried by a gadget: a concrete number for the bounded
/// constructions, `NonPolynomial` reserved for asymptotic statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimedPeriod {
    Exactly(u64),
    NonPolynomial,
}

impl std::fmt::Display for ClaimedPeriod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClaimedPeriod::Exactly(p) => f.pad(&p.to_string()),
            ClaimedPeriod::NonPolynomial => f.pad("nonpolynomial"),
        }
    }
}

impl Serialize for ClaimedPeriod {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            ClaimedPeriod::Exactly(p) => ser.serialize_u64(*p),
            ClaimedPeriod::NonPolynomial => ser.serialize_str("nonpolynomial"),
        }
    }
}

impl<'de> Deserialize<'de> for ClaimedPeriod {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(p) => Ok(ClaimedPeriod::Exactly(p)),
            Raw::Str(s) if s == "nonpolynomial" => Ok(ClaimedPeriod::NonPolynomial),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected integer or \"nonpolynomial\", got {s:?}"
            ))),
        }
    }
}

/// A constructed network together with its prescribed initial condition,
/// period claim, per-node role labels and enough structural metadata to
/// test component isolation and connector safety.
#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub net: FmNetwork,
    pub initial: FmState,
    pub claimed_period: ClaimedPeriod,
    /// Role name per node; total and injective.
    pub labels: Vec<String>,
    /// Node sets of the independent components (empty when the gadget is
    /// a single component).
    pub components: Vec<Vec<NodeId>>,
    /// (dependent, input) pairs along inter-component connectors; the
    /// construction collapses if both ends of a pair are simultaneously 0.
    pub connector_pairs: Vec<(NodeId, NodeId)>,
}

impl GadgetInstance {
    /// Network JSON extended with `labels` and `claimed_period`.
    pub fn network_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(&self.net).expect("network serializes");
        let labels: serde_json::Map<String, serde_json::Value> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (i.to_string(), json!(l)))
            .collect();
        v["labels"] = serde_json::Value::Object(labels);
        v["claimed_period"] = serde_json::to_value(self.claimed_period).expect("claim serializes");
        v
    }

    pub fn state_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.initial).expect("state serializes")
    }

    pub fn to_dot(&self) -> String {
        self.net.to_dot(Some(&self.labels))
    }
}

/// Result of measuring a gadget's period claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyOutcome {
    pub ok: bool,
    pub measured: u64,
    pub transient: u64,
}

/// Run the trajectory from the gadget's initial condition; `ok` iff the
/// orbit is immediately periodic (transient 0) with exactly the claimed
/// period. Numeric claims only; a `NonPolynomial` claim checks just the
/// zero transient.
pub fn verify_claimed_period(g: &GadgetInstance, budget: u64) -> Result<VerifyOutcome, DynError> {
    let t = find_attractor(&g.net, &g.initial, budget)?;
    let ok = match g.claimed_period {
        ClaimedPeriod::Exactly(p) => t.transient == 0 && t.period as u64 == p,
        ClaimedPeriod::NonPolynomial => t.transient == 0,
    };
    Ok(VerifyOutcome { ok, measured: t.period as u64, transient: t.transient as u64 })
}

// --- construction scaffolding ----------------------------------------------

struct Builder {
    labels: Vec<String>,
    dt: Vec<u32>,
    initial: Vec<u32>,
    inputs: Vec<BTreeSet<NodeId>>,
}

impl Builder {
    fn new() -> Self {
        Builder { labels: Vec::new(), dt: Vec::new(), initial: Vec::new(), inputs: Vec::new() }
    }

    fn node(&mut self, label: String, dt: u32, initial: u32) -> NodeId {
        debug_assert!(initial <= dt);
        let id = self.labels.len();
        self.labels.push(label);
        self.dt.push(dt);
        self.initial.push(initial);
        self.inputs.push(BTreeSet::new());
        id
    }

    /// Mutual dependency: each endpoint becomes an input of the other.
    fn undirected(&mut self, a: NodeId, b: NodeId) {
        self.inputs[a].insert(b);
        self.inputs[b].insert(a);
    }

    /// One-way dependency: `from` becomes an input of `to`.
    fn directed(&mut self, from: NodeId, to: NodeId) {
        self.inputs[to].insert(from);
    }

    fn finish(
        self,
        claimed_period: ClaimedPeriod,
        components: Vec<Vec<NodeId>>,
        connector_pairs: Vec<(NodeId, NodeId)>,
    ) -> GadgetInstance {
        let rules = self
            .inputs
            .into_iter()
            .map(|ins| LocalRule::conjunctive(ins.into_iter().collect()))
            .collect();
        let net = FmNetwork::new(rules, self.dt).expect("builder produces valid networks");
        GadgetInstance {
            net,
            initial: FmState::new(self.initial),
            claimed_period,
            labels: self.labels,
            components,
            connector_pairs,
        }
    }
}

/// Attach a fresh clock (complete graph `K_{tau+1}`, delay `tau`) whose
/// contact node `a` starts at `a_value`; the other nodes take the
/// remaining rotation values in ascending order, so the whole clock sits
/// on its period-`tau+1` orbit. Returns the contact node.
fn add_clock(b: &mut Builder, tau: u32, a_value: u32, label_prefix: &str) -> NodeId {
    let values: Vec<u32> = std::iter::once(a_value)
        .chain((0..=tau).filter(|&v| v != a_value))
        .collect();
    let nodes: Vec<NodeId> = values
        .iter()
        .enumerate()
        .map(|(q, &v)| {
            let label = if q == 0 {
                format!("{label_prefix}.a")
            } else {
                format!("{label_prefix}.n{}", q - 1)
            };
            b.node(label, tau, v)
        })
        .collect();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            b.undirected(nodes[i], nodes[j]);
        }
    }
    nodes[0]
}

// --- clocks ------------------------------------------------------------

/// Complete conjunctive graph `K_{tau+1}`, delay `tau` everywhere,
/// initial condition `(0, 1, ..., tau)`: one full rotation, period
/// `tau + 1`.
pub fn build_clock_network(tau: u32) -> Result<GadgetInstance, GadgetError> {
    if tau < 2 {
        return Err(GadgetError::TauTooSmall(tau));
    }
    let mut b = Builder::new();
    let nodes: Vec<NodeId> = (0..=tau).map(|v| b.node(format!("K.v{v}"), tau, v)).collect();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            b.undirected(nodes[i], nodes[j]);
        }
    }
    Ok(b.finish(ClaimedPeriod::Exactly(tau as u64 + 1), Vec::new(), Vec::new()))
}

// --- blocks and block-cycles ---------------------------------------------

/// Handles into a block-cycle added to a builder.
struct BlockCycleIds {
    /// Path nodes, block-major: `path[j * (tau+1) + r]`.
    #[allow(dead_code)]
    path: Vec<NodeId>,
    /// Clock contact nodes per path node: `clock_a[pos][l]`.
    clock_a: Vec<Vec<NodeId>>,
}

/// Add `k` blocks wired into a cycle of `k(tau+1)` path nodes. Each path
/// node carries `tau - 1` clocks through their contact nodes.
///
/// Initial condition: block 0's path reads `(0, 1, ..., tau)`, every
/// other block `(tau, 1, 2, ..., tau)`. The contact node of clock `l` at
/// path position `r` starts at `(r + 1 + l) mod (tau+1)` — the schedule
/// that keeps a clock's zero instants away from the moments its path node
/// must fire.
fn add_block_cycle(b: &mut Builder, tau: u32, k: u32, prefix: &str) -> BlockCycleIds {
    let span = tau as usize + 1;
    let mut path = Vec::with_capacity(k as usize * span);
    let mut clock_a = Vec::with_capacity(k as usize * span);
    for j in 0..k {
        for r in 0..=tau {
            let initial = if j == 0 {
                r
            } else if r == 0 {
                tau
            } else {
                r
            };
            let id = b.node(format!("{prefix}B_{j}.path[{r}]"), tau, initial);
            path.push(id);
            let mut contacts = Vec::with_capacity(tau as usize - 1);
            for l in 0..tau - 1 {
                let a_value = (r + 1 + l) % (tau + 1);
                let a = add_clock(b, tau, a_value, &format!("{prefix}C(B_{j})_{{{r},{l}}}"));
                b.undirected(a, id);
                contacts.push(a);
            }
            clock_a.push(contacts);
        }
    }
    let total = path.len();
    for p in 0..total {
        b.undirected(path[p], path[(p + 1) % total]);
    }
    BlockCycleIds { path, clock_a }
}

/// `k` blocks in a cycle: `k(tau+1)` path nodes, each with `tau - 1`
/// clocks, delay `tau` everywhere; the prescribed initial condition walks
/// the whole cycle with period `k(tau+1)` and zero transient.
pub fn build_block_cycle(tau: u32, k: u32) -> Result<GadgetInstance, GadgetError> {
    if tau < 2 {
        return Err(GadgetError::TauTooSmall(tau));
    }
    if k < 1 {
        return Err(GadgetError::KTooSmall(k));
    }
    let mut b = Builder::new();
    add_block_cycle(&mut b, tau, k, "");
    Ok(b.finish(
        ClaimedPeriod::Exactly(k as u64 * (tau as u64 + 1)),
        Vec::new(),
        Vec::new(),
    ))
}

/// Node count of `build_block_cycle(tau, k)`:
/// `k (tau+1) (1 + (tau-1)(tau+1))`.
pub fn block_cycle_node_count(tau: u32, k: u32) -> usize {
    let tau = tau as usize;
    let k = k as usize;
    k * (tau + 1) * (1 + (tau - 1) * (tau + 1))
}

// --- prime unions -----------------------------------------------------------

/// How adjacent components of a heterogeneous prime union are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConnectorStyle {
    /// A delay-2 relay node listens to the upstream connector vertex and
    /// feeds the downstream one. The relay's boolean state never drops, so
    /// each component keeps its rotation and the global period is the lcm
    /// of the component periods.
    #[default]
    Buffered,
    /// The bare one-way dependency `s_i <- s_{i+1}`. Whenever the two
    /// component periods admit a common zero instant (always, for coprime
    /// periods) the downstream rotation collapses; kept for studying that
    /// failure mode.
    DirectEdge,
}

/// Options for [`build_prime_union_hetero_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct HeteroOptions {
    pub connector: ConnectorStyle,
    /// Build `K_{p}` with delay `p - 1` (component period exactly `p`)
    /// instead of `K_{p+1}` with delay `p` (component period `p + 1`), so
    /// the global period is exactly the product of the primes.
    pub coprime_fix: bool,
}

/// Heterogeneous prime union with default options (buffered connectors,
/// components `K_{p+1}` with delay `p`).
pub fn build_prime_union_hetero(primes: &[u64]) -> Result<GadgetInstance, GadgetError> {
    build_prime_union_hetero_with(primes, HeteroOptions::default())
}

/// Chain of complete-graph components, one per prime, each set on its
/// rotation orbit. Component `i` has `m_i` nodes and period `m_i`
/// (`m_i = p_i + 1`, or `p_i` under `coprime_fix`); the designated vertex
/// `s_i` of each non-final component depends one-way on the next
/// component. The claimed global period is `lcm(m_i)`.
pub fn build_prime_union_hetero_with(
    primes: &[u64],
    opts: HeteroOptions,
) -> Result<GadgetInstance, GadgetError> {
    validate_primes(primes)?;
    let sizes: Vec<u64> = primes
        .iter()
        .map(|&p| if opts.coprime_fix { p } else { p + 1 })
        .collect();

    // Phase of the connector vertex in each component's rotation. With
    // buffered connectors any phase works; with the bare edge, pick
    // phases that postpone (or, when gcd(m_i, m_{i+1}) > 1, entirely
    // avoid) the instant where s_i must fire while s_{i+1} is 0.
    let phases: Vec<u32> = match opts.connector {
        ConnectorStyle::Buffered => sizes.iter().map(|_| 1).collect(),
        ConnectorStyle::DirectEdge => pick_direct_edge_phases(&sizes),
    };

    let mut b = Builder::new();
    let mut components: Vec<Vec<NodeId>> = Vec::new();
    let mut connectors: Vec<NodeId> = Vec::new();
    for (ci, (&m, &phase)) in sizes.iter().zip(&phases).enumerate() {
        let dt = m as u32 - 1;
        let values: Vec<u32> = std::iter::once(phase)
            .chain((0..m as u32).filter(|&v| v != phase))
            .collect();
        let nodes: Vec<NodeId> = values
            .iter()
            .enumerate()
            .map(|(q, &v)| {
                let label = if q == 0 {
                    format!("K{m}[{ci}].s")
                } else {
                    format!("K{m}[{ci}].v{}", q - 1)
                };
                b.node(label, dt, v)
            })
            .collect();
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                b.undirected(nodes[i], nodes[j]);
            }
        }
        connectors.push(nodes[0]);
        components.push(nodes);
    }

    let mut connector_pairs = Vec::new();
    for i in 0..sizes.len().saturating_sub(1) {
        let dep = connectors[i];
        let upstream = connectors[i + 1];
        match opts.connector {
            ConnectorStyle::DirectEdge => {
                b.directed(upstream, dep);
                connector_pairs.push((dep, upstream));
            }
            ConnectorStyle::Buffered => {
                // Relay value is 2 except the step right after the
                // upstream vertex's zero instant; start it on that orbit.
                let period = sizes[i + 1] as u32;
                let init = if phases[i + 1] == period - 1 { 1 } else { 2 };
                let relay = b.node(format!("link[{i}]"), 2, init);
                b.directed(upstream, relay);
                b.directed(relay, dep);
                connector_pairs.push((dep, relay));
                connector_pairs.push((relay, upstream));
            }
        }
    }

    let claimed = sizes.iter().fold(1u64, |acc, &m| lcm(acc, m));
    Ok(b.finish(ClaimedPeriod::Exactly(claimed), components, connector_pairs))
}

/// For the bare-edge connector, pick each component's connector phase to
/// dodge the other end's zero instants when the period arithmetic allows
/// it, and otherwise to push the first collision as far out as possible.
fn pick_direct_edge_phases(sizes: &[u64]) -> Vec<u32> {
    let mut phases: Vec<u32> = vec![0; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        let dep_m = sizes[i];
        let inp_m = sizes[i + 1];
        let inp_phase = phases[i + 1] as u64;
        // s_i must fire at t = dep_phase (mod dep_m); s_{i+1} is 0 at
        // t = inp_phase (mod inp_m). Score each candidate by the first
        // common instant.
        let (best, _) = (0..dep_m)
            .map(|cand| {
                let first = (0..dep_m * inp_m)
                    .find(|t| t % dep_m == cand && t % inp_m == inp_phase)
                    .map(|t| t + 1)
                    .unwrap_or(u64::MAX);
                (cand, first)
            })
            .max_by_key(|&(cand, first)| (first, u64::MAX - cand))
            .expect("component size >= 2");
        phases[i] = best as u32;
    }
    phases
}

/// Uniform-delay prime union: one block-cycle `C_{p_i}` per prime (period
/// `p_i (tau+1)`), chained through clock contact nodes. The contact of
/// the first path vertex of a component's first block depends one-way on
/// the contact of the *second* path vertex of the next component's first
/// block; those two clocks sit at rotation phases 1 and 2, so neither is
/// ever 0 when the other must fire. Claimed period `lcm(p_i (tau+1))`.
pub fn build_prime_union_uniform(
    tau: u32,
    primes: &[u64],
) -> Result<GadgetInstance, GadgetError> {
    if tau < 2 {
        return Err(GadgetError::TauTooSmall(tau));
    }
    validate_primes(primes)?;
    let mut b = Builder::new();
    let mut components = Vec::new();
    let mut firsts = Vec::new();
    let mut seconds = Vec::new();
    for (ci, &p) in primes.iter().enumerate() {
        let lo = b.labels.len();
        let ids = add_block_cycle(&mut b, tau, p as u32, &format!("C{p}[{ci}]."));
        firsts.push(ids.clock_a[0][0]);
        seconds.push(ids.clock_a[1][0]);
        components.push((lo..b.labels.len()).collect::<Vec<NodeId>>());
    }
    let mut connector_pairs = Vec::new();
    for i in 0..primes.len().saturating_sub(1) {
        let dep = firsts[i];
        let upstream = seconds[i + 1];
        b.directed(upstream, dep);
        connector_pairs.push((dep, upstream));
    }
    let claimed = primes
        .iter()
        .fold(1u64, |acc, &p| lcm(acc, p * (tau as u64 + 1)));
    Ok(b.finish(ClaimedPeriod::Exactly(claimed), components, connector_pairs))
}

fn validate_primes(primes: &[u64]) -> Result<(), GadgetError> {
    if primes.is_empty() {
        return Err(GadgetError::EmptyList);
    }
    if let Some(&p) = primes.iter().find(|&&p| p < 2) {
        return Err(GadgetError::PrimeTooSmall(p));
    }
    let set: BTreeSet<u64> = primes.iter().copied().collect();
    if set.len() != primes.len() {
        return Err(GadgetError::NonDistinctPrimes);
    }
    Ok(())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
