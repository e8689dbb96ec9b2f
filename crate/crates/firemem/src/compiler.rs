//! Compile alternating monotone circuits into conjunctive networks with
//! firing memory and uniform delay 2.
//!
//! Circuit values ride on *blocks* (three path nodes, each holding a
//! rotating clock): a block at rest cycles `122 -> 212 -> 221`, and a
//! signal is a travelling 0 that crosses one block every 3 steps. Wire
//! codes on a block's path at sampling instants: `122` encodes 0, `120`
//! encodes 1.
//!
//! Gates connect blocks: an OR joins two incoming blocks straight into
//! its output block (either pulse enters; 3 steps). An AND routes its
//! first input through a two-node relay chain and its second through a
//! one-node relay into a clock-less junction of delay 2; only when both
//! pulses hit the junction on consecutive steps does it drain to 0 and
//! emit (6 steps), while a lone pulse is absorbed. Wire blocks pad every
//! edge so that all signals cross each layer in phase, making the whole
//! network advance one circuit iteration every `p` steps.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::json;
use thiserror::Error;

use crate::circuit::{
    parse_circuit, AltViolation, AlternatingCircuit, CircuitError, GateKind, MonotoneCircuit,
    Ref,
};
use crate::dynamics::{predict, Prediction, PredictionQuery};
use crate::net::{FmNetwork, FmState, LocalRule, NodeId, RuleKind};

/// Uniform maximum delay of every compiled node.
pub const COMPILED_DT: u32 = 2;

/// Path length of a block (and size of each clock, `K_3`).
const SPAN: usize = 3;

/// Block path resting values and the matching clock contact phases.
const PATH_BASE: [u32; SPAN] = [1, 2, 2];
const CLOCK_BASE: [u32; SPAN] = [2, 0, 1];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("circuit is not alternating: {0}")]
    NotAlternating(AltViolation),
    #[error("gate {gate} has degree {degree} > 4")]
    DegreeTooHigh { gate: usize, degree: usize },
    #[error("calibration failed: no simulation period <= {0} works")]
    CalibrationFailed(usize),
    #[error("compiled json: {0}")]
    Json(String),
    #[error("compiled json circuit: {0}")]
    Circuit(#[from] CircuitError),
}

/// Decoding failure: a block whose path matches neither wire code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("block {block} holds {observed:?}, which is neither code 122 nor 120")]
pub struct IllFormed {
    pub block: usize,
    pub observed: [u32; 3],
}

/// A compiled circuit: the network, the resting state, where each circuit
/// input lives, and the simulation period `p` tying `F^p` to one circuit
/// iteration.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    pub net: FmNetwork,
    pub base_state: FmState,
    /// Path nodes `[p1, p2, p3]` of block `B_k` per circuit input.
    pub input_blocks: Vec<[NodeId; 3]>,
    /// Nodes belonging to each gate's gadget (relays, junction, output
    /// block and their clocks).
    pub gate_gadgets: BTreeMap<usize, Vec<NodeId>>,
    /// Steps of the network per circuit iteration.
    pub p: usize,
    /// Loop length in 3-step stages; `p == 3 * stages`.
    pub stages: usize,
    pub labels: Vec<String>,
    pub circuit: AlternatingCircuit,
}

// --- low-level builder ------------------------------------------------------

struct NetBuilder {
    labels: Vec<String>,
    base: Vec<u32>,
    inputs: Vec<BTreeSet<NodeId>>,
}

impl NetBuilder {
    fn new() -> Self {
        NetBuilder { labels: Vec::new(), base: Vec::new(), inputs: Vec::new() }
    }

    fn node(&mut self, label: String, base: u32) -> NodeId {
        let id = self.labels.len();
        self.labels.push(label);
        self.base.push(base);
        self.inputs.push(BTreeSet::new());
        id
    }

    fn undirected(&mut self, a: NodeId, b: NodeId) {
        self.inputs[a].insert(b);
        self.inputs[b].insert(a);
    }

    /// Clock `K_3` with contact phase `a_value`; peers complete the
    /// rotation. Returns the contact node.
    fn clock(&mut self, prefix: &str, a_value: u32) -> NodeId {
        let mut nodes = vec![self.node(format!("{prefix}.clk.a"), a_value)];
        for (q, v) in (0..=COMPILED_DT).filter(|&v| v != a_value).enumerate() {
            nodes.push(self.node(format!("{prefix}.clk.n{q}"), v));
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                self.undirected(nodes[i], nodes[j]);
            }
        }
        nodes[0]
    }

    /// A full block: three path nodes with their clocks, at rest.
    fn block(&mut self, prefix: &str) -> [NodeId; 3] {
        let mut path = [0; 3];
        for (r, id) in path.iter_mut().enumerate() {
            *id = self.node(format!("{prefix}.p{}", r + 1), PATH_BASE[r]);
            let a = self.clock(&format!("{prefix}.p{}", r + 1), CLOCK_BASE[r]);
            self.undirected(a, *id);
        }
        self.undirected(path[0], path[1]);
        self.undirected(path[1], path[2]);
        path
    }

    /// Single relay node (a truncated block position) with its clock.
    fn relay(&mut self, prefix: &str, base: u32, clock_phase: u32) -> NodeId {
        let id = self.node(prefix.to_string(), base);
        let a = self.clock(prefix, clock_phase);
        self.undirected(a, id);
        id
    }

    fn finish(self) -> (FmNetwork, FmState, Vec<String>) {
        let rules = self
            .inputs
            .into_iter()
            .map(|ins| LocalRule::conjunctive(ins.into_iter().collect()))
            .collect();
        let net = FmNetwork::new(rules, vec![COMPILED_DT; self.labels.len()])
            .expect("compiler emits valid networks");
        (net, FmState::new(self.base), self.labels)
    }
}

// --- compilation -----------------------------------------------------------

/// Validate a plain monotone circuit and compile it.
pub fn compile_circuit(c: &MonotoneCircuit) -> Result<CompiledCircuit, CompileError> {
    let alt = AlternatingCircuit::try_from_circuit(c.clone()).map_err(|v| match v {
        AltViolation::DegreeTooHigh { gate, degree } => {
            CompileError::DegreeTooHigh { gate, degree }
        }
        other => CompileError::NotAlternating(other),
    })?;
    compile(&alt)
}

/// Compile an alternating circuit into a conjunctive delay-2 network.
///
/// Every producer (circuit input or gate) is assigned an arrival stage:
/// inputs start at stage 0, an OR or identity gate finishes one stage
/// after its latest argument, an AND two stages after. Wire blocks pad
/// the faster edges so both gate inputs land together, and each output
/// returns to its input block through at least one wire block, making
/// every feedback loop exactly `stages` long. One stage is 3 steps, so
/// `p = 3 * stages`.
pub fn compile(alt: &AlternatingCircuit) -> Result<CompiledCircuit, CompileError> {
    let c = alt.circuit();
    let n = c.n_inputs();

    // Deduplicated args and per-gate cost.
    let gate_args: Vec<Vec<Ref>> = c
        .gates()
        .iter()
        .map(|g| {
            let mut args = Vec::new();
            for a in &g.args {
                if !args.contains(a) {
                    args.push(*a);
                }
            }
            args
        })
        .collect();
    let cost = |gi: usize| -> usize {
        if c.gates()[gi].kind == GateKind::And && gate_args[gi].len() == 2 {
            2
        } else {
            1
        }
    };

    // Arrival stages.
    let mut arr_gate = vec![0usize; c.gates().len()];
    for &gi in c.topo_order() {
        let raw = gate_args[gi]
            .iter()
            .map(|a| match *a {
                Ref::Input(_) => 0,
                Ref::Gate(j) => arr_gate[j],
            })
            .max()
            .expect("gates have arguments");
        arr_gate[gi] = raw + cost(gi);
    }
    let stages = c
        .outputs()
        .iter()
        .map(|o| match *o {
            Ref::Gate(j) => arr_gate[j],
            Ref::Input(_) => 0,
        })
        .max()
        .unwrap_or(0)
        + 2;

    let mut b = NetBuilder::new();
    let input_blocks: Vec<[NodeId; 3]> =
        (0..n).map(|k| b.block(&format!("B[{k}]"))).collect();

    // Shared forward padding: (source, stage) -> p3 of the block carrying
    // that value at that stage.
    let mut pools: HashMap<(Ref, usize), NodeId> = HashMap::new();
    let mut wire_count = 0usize;
    let mut gate_out: Vec<[NodeId; 3]> = vec![[0; 3]; c.gates().len()];
    let arr_of = |r: &Ref, arr_gate: &[usize]| match *r {
        Ref::Input(_) => 0usize,
        Ref::Gate(j) => arr_gate[j],
    };

    fn provide(
        b: &mut NetBuilder,
        pools: &mut HashMap<(Ref, usize), NodeId>,
        wire_count: &mut usize,
        src: Ref,
        src_stage: usize,
        src_p3: NodeId,
        want: usize,
    ) -> NodeId {
        if want == src_stage {
            return src_p3;
        }
        if let Some(&id) = pools.get(&(src, want)) {
            return id;
        }
        let below = provide(b, pools, wire_count, src, src_stage, src_p3, want - 1);
        let w = *wire_count;
        *wire_count += 1;
        let block = b.block(&format!("wire[{w}]"));
        b.undirected(below, block[0]);
        pools.insert((src, want), block[2]);
        block[2]
    }

    let mut gate_gadgets: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for &gi in c.topo_order() {
        let lo = b.labels.len();
        let s = arr_gate[gi];
        let args = &gate_args[gi];
        let p3_at = |b: &mut NetBuilder,
                     pools: &mut HashMap<(Ref, usize), NodeId>,
                     wire_count: &mut usize,
                     gate_out: &[[NodeId; 3]],
                     r: &Ref,
                     want: usize| {
            let (stage, p3) = match *r {
                Ref::Input(k) => (0, input_blocks[k][2]),
                Ref::Gate(j) => (arr_gate[j], gate_out[j][2]),
            };
            provide(b, pools, wire_count, *r, stage, p3, want)
        };
        let out = b.block(&format!("g[{gi}].out"));
        if c.gates()[gi].kind == GateKind::And && args.len() == 2 {
            let in0 = p3_at(&mut b, &mut pools, &mut wire_count, &gate_out, &args[0], s - 2);
            let in1 = p3_at(&mut b, &mut pools, &mut wire_count, &gate_out, &args[1], s - 2);
            let r1 = b.relay(&format!("g[{gi}].r1"), 1, 2);
            let r2 = b.relay(&format!("g[{gi}].r2"), 2, 0);
            let rb = b.relay(&format!("g[{gi}].rB"), 1, 2);
            let junction = b.node(format!("g[{gi}].J"), 2);
            b.undirected(in0, r1);
            b.undirected(r1, r2);
            b.undirected(r2, junction);
            b.undirected(in1, rb);
            b.undirected(rb, junction);
            b.undirected(junction, out[0]);
        } else {
            for a in args {
                let src = p3_at(&mut b, &mut pools, &mut wire_count, &gate_out, a, s - 1);
                b.undirected(src, out[0]);
            }
        }
        gate_out[gi] = out;
        gate_gadgets.insert(gi, (lo..b.labels.len()).collect());
    }

    // Returns: unshared wire chains, at least one block each, so fan-out
    // happens at the producing gate's p3.
    for (k, o) in c.outputs().iter().enumerate() {
        let (mut stage, mut p3) = match *o {
            Ref::Gate(j) => (arr_gate[j], gate_out[j][2]),
            Ref::Input(_) => unreachable!("alternating outputs are gates"),
        };
        debug_assert!(stage + 1 < stages + 1);
        while stage < stages - 1 {
            let block = b.block(&format!("ret[{k}].{}", stage + 1));
            b.undirected(p3, block[0]);
            p3 = block[2];
            stage += 1;
        }
        b.undirected(p3, input_blocks[k][0]);
    }
    let _ = arr_of;

    let (net, base_state, labels) = b.finish();
    debug_assert!(net.dt().iter().all(|&d| d == COMPILED_DT));
    debug_assert!(net
        .rules()
        .iter()
        .all(|r| r.kind == RuleKind::Conjunctive));

    let mut cc = CompiledCircuit {
        net,
        base_state,
        input_blocks,
        gate_gadgets,
        p: 0,
        stages,
        labels,
        circuit: alt.clone(),
    };
    cc.p = determine_period(&cc, 3 * stages + 33)?;
    Ok(cc)
}

/// Wire codes of the encoding: block path `122` for 0, `120` for 1.
pub fn wire_code(value: bool) -> [u32; 3] {
    if value {
        [1, 2, 0]
    } else {
        [1, 2, 2]
    }
}

/// `phi(x)`: the resting state with each input block's path overwritten
/// by its wire code.
pub fn encode(cc: &CompiledCircuit, x: &[bool]) -> FmState {
    assert_eq!(x.len(), cc.input_blocks.len(), "input width mismatch");
    let mut s = cc.base_state.clone();
    for (block, &v) in cc.input_blocks.iter().zip(x) {
        for (node, val) in block.iter().zip(wire_code(v)) {
            s.delta[*node] = val;
        }
    }
    s
}

/// Read each input block's path back into a boolean vector; any pattern
/// other than the two wire codes means the state was sampled off the
/// `p`-grid (or the network was corrupted).
pub fn decode(cc: &CompiledCircuit, s: &FmState) -> Result<Vec<bool>, IllFormed> {
    cc.input_blocks
        .iter()
        .enumerate()
        .map(|(k, block)| {
            let observed = [s.delta[block[0]], s.delta[block[1]], s.delta[block[2]]];
            if observed == wire_code(false) {
                Ok(false)
            } else if observed == wire_code(true) {
                Ok(true)
            } else {
                Err(IllFormed { block: k, observed })
            }
        })
        .collect()
}

/// Calibrate the simulation period: the smallest `p >= 1` such that for
/// every calibration input `x`, `F^p(phi(x))` equals `phi(C(x))` as a
/// full network state (blocks carry the next iteration's codes, all other
/// machinery back at its resting phase).
pub fn determine_period(cc: &CompiledCircuit, budget: usize) -> Result<usize, CompileError> {
    let n = cc.input_blocks.len();
    let xs: Vec<Vec<bool>> = if n <= 10 {
        (0..1u32 << n)
            .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect())
            .collect()
    } else {
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut xs: Vec<Vec<bool>> = vec![vec![false; n], vec![true; n]];
        for _ in 0..256 {
            xs.push(
                (0..n)
                    .map(|_| {
                        seed = seed
                            .wrapping_mul(6364136223846793005)
                            .wrapping_add(1442695040888963407);
                        seed >> 33 & 1 == 1
                    })
                    .collect(),
            );
        }
        xs
    };

    // Trajectories once, then scan candidate periods.
    let trajectories: Vec<(Vec<FmState>, FmState)> = xs
        .iter()
        .map(|x| {
            let mut states = Vec::with_capacity(budget + 1);
            let mut cur = encode(cc, x);
            states.push(cur.clone());
            for _ in 0..budget {
                cur = cc.net.step(&cur);
                states.push(cur.clone());
            }
            let target = encode(cc, &cc.circuit.eval(x));
            (states, target)
        })
        .collect();

    (1..=budget)
        .find(|&p| trajectories.iter().all(|(states, target)| states[p] == *target))
        .ok_or(CompileError::CalibrationFailed(budget))
}

/// `decode(F^{p t}(phi(x0)))`: run `t` circuit iterations in the network.
pub fn simulate_iterations(
    cc: &CompiledCircuit,
    x0: &[bool],
    t: usize,
) -> Result<Vec<bool>, IllFormed> {
    let mut s = encode(cc, x0);
    for _ in 0..t * cc.p {
        s = cc.net.step(&s);
    }
    decode(cc, &s)
}

/// A prediction instance produced by the reduction: the compiled network,
/// the initial state `phi(x0)` and the monitored node.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub compiled: CompiledCircuit,
    pub initial: FmState,
    /// Third path node of the monitored input block: its boolean state
    /// flips iff the monitored circuit coordinate ever turns 1.
    pub node: NodeId,
    /// Input index of the monitored block in the compiled circuit.
    pub monitored_input: usize,
    /// Index of the monitored coordinate in the original circuit.
    pub source_index: usize,
    /// Whether the circuit was extended with an auxiliary always-0 input.
    pub extended: bool,
}

impl ReductionInstance {
    /// Answer the network-side prediction question by simulation.
    pub fn fm_predict(&self) -> Prediction {
        predict(&PredictionQuery {
            net: &self.compiled.net,
            node: self.node,
            initial: self.initial.clone(),
        })
    }

    /// Reuse the compiled network for a different initial vector. The
    /// polarity at the monitored coordinate must match the one this
    /// instance was built for.
    pub fn with_initial(&self, x0: &[bool]) -> ReductionInstance {
        let mut x = x0.to_vec();
        if self.extended {
            assert!(x0[self.source_index], "instance was built for x0_i = 1");
            x.push(false);
        } else {
            assert!(!x0[self.source_index], "instance was built for x0_i = 0");
        }
        ReductionInstance { initial: encode(&self.compiled, &x), ..self.clone() }
    }
}

/// Reduce the iterated-circuit prediction question `exists t >= 1 with
/// C^t(x0)_i = 1` to network prediction.
///
/// With `x0_i = 0` the monitored block rests at code 122, whose third
/// node is boolean 1 at every step and drops to 0 exactly when a signal
/// pulse is delivered; so the network flip question matches the circuit
/// question directly. With `x0_i = 1` the initial code 120 would flip
/// trivially at the very first step, so the circuit is extended first
/// with a fresh always-0 input z whose output comes from
/// `or(g_i, and(z, g_i))` — equal to `g_i` by absorption — and z's block
/// is monitored instead.
pub fn reduce_prediction(
    alt: &AlternatingCircuit,
    x0: &[bool],
    i: usize,
) -> Result<ReductionInstance, CompileError> {
    assert_eq!(x0.len(), alt.circuit().n_inputs());
    assert!(i < x0.len(), "monitored index out of range");
    if !x0[i] {
        let compiled = compile(alt)?;
        let node = compiled.input_blocks[i][2];
        let initial = encode(&compiled, x0);
        return Ok(ReductionInstance {
            compiled,
            initial,
            node,
            monitored_input: i,
            source_index: i,
            extended: false,
        });
    }

    let c = alt.circuit();
    let mut gates = c.gates().to_vec();
    let o_i = c.outputs()[i];
    let z = c.n_inputs();
    gates.push(crate::circuit::Gate {
        kind: GateKind::And,
        args: vec![Ref::Input(z), o_i],
    });
    let and_ref = Ref::Gate(gates.len() - 1);
    gates.push(crate::circuit::Gate { kind: GateKind::Or, args: vec![o_i, and_ref] });
    let or_ref = Ref::Gate(gates.len() - 1);
    let mut outputs = c.outputs().to_vec();
    outputs.push(or_ref);
    let mut names = c.input_names().to_vec();
    let mut zname = "z".to_string();
    while names.contains(&zname) {
        zname.push('_');
    }
    names.push(zname);
    let extended = MonotoneCircuit::new(z + 1, gates, outputs, Some(names))
        .expect("extension preserves validity");
    let alt_ext = crate::circuit::normalize_alternating(&extended);
    let compiled = compile(&alt_ext)?;
    let node = compiled.input_blocks[z][2];
    let mut x = x0.to_vec();
    x.push(false);
    let initial = encode(&compiled, &x);
    Ok(ReductionInstance {
        compiled,
        initial,
        node,
        monitored_input: z,
        source_index: i,
        extended: true,
    })
}

// --- standalone gate fixtures ------------------------------------------

/// A single gate gadget in isolation: two input
/// blocks, the gadget, its output block and two dangling fan-out blocks.
#[derive(Debug, Clone)]
pub struct GateFixture {
    pub kind: GateKind,
    pub net: FmNetwork,
    pub base: FmState,
    pub labels: Vec<String>,
    pub inputs: [[NodeId; 3]; 2],
    pub output: [NodeId; 3],
}

pub fn gate_fixture(kind: GateKind) -> GateFixture {
    let mut b = NetBuilder::new();
    let in0 = b.block("in0");
    let in1 = b.block("in1");
    let out = b.block("out");
    match kind {
        GateKind::Or => {
            b.undirected(in0[2], out[0]);
            b.undirected(in1[2], out[0]);
        }
        GateKind::And => {
            let r1 = b.relay("r1", 1, 2);
            let r2 = b.relay("r2", 2, 0);
            let rb = b.relay("rB", 1, 2);
            let junction = b.node("J".into(), 2);
            b.undirected(in0[2], r1);
            b.undirected(r1, r2);
            b.undirected(r2, junction);
            b.undirected(in1[2], rb);
            b.undirected(rb, junction);
            b.undirected(junction, out[0]);
        }
    }
    let f0 = b.block("fan0");
    let f1 = b.block("fan1");
    b.undirected(out[2], f0[0]);
    b.undirected(out[2], f1[0]);
    let (net, base, labels) = b.finish();
    GateFixture { kind, net, base, labels, inputs: [in0, in1], output: out }
}

impl GateFixture {
    /// Base state with the two inputs encoded on the input blocks.
    pub fn encode(&self, a: bool, bv: bool) -> FmState {
        let mut s = self.base.clone();
        for (block, v) in self.inputs.iter().zip([a, bv]) {
            for (node, val) in block.iter().zip(wire_code(v)) {
                s.delta[*node] = val;
            }
        }
        s
    }

    /// Steps until the output block carries the gate result and every
    /// other node is back at its resting value, maximized over the four
    /// input pairs. The per-pair settle is the smallest multiple of 3
    /// where that holds.
    pub fn measure_settle(&self, max_steps: usize) -> Option<usize> {
        let mut worst = 0;
        for mask in 0..4u32 {
            let a = mask & 1 == 1;
            let bv = mask >> 1 & 1 == 1;
            let expected = match self.kind {
                GateKind::And => a && bv,
                GateKind::Or => a || bv,
            };
            let mut s = self.encode(a, bv);
            let mut settled = None;
            for t in 1..=max_steps {
                s = self.net.step(&s);
                if t % 3 != 0 {
                    continue;
                }
                if self.is_settled(&s, expected) {
                    settled = Some(t);
                    break;
                }
            }
            worst = worst.max(settled?);
        }
        Some(worst)
    }

    /// `s` equals base everywhere except the output path carrying
    /// `expected`'s wire code.
    pub fn is_settled(&self, s: &FmState, expected: bool) -> bool {
        let code = wire_code(expected);
        for i in 0..s.delta.len() {
            if let Some(r) = self.output.iter().position(|&n| n == i) {
                if s.delta[i] != code[r] {
                    return false;
                }
            } else if s.delta[i] != self.base.delta[i] {
                return false;
            }
        }
        true
    }

    /// Undirected edge count (every dependency in the fixture is mutual).
    pub fn edge_count(&self) -> usize {
        self.net.rules().iter().map(|r| r.inputs.len()).sum::<usize>() / 2
    }
}

// --- compiled json -----------------------------------------------------

/// Network JSON extended with `p`, `input_blocks`, `base_state` plus the
/// circuit text and labels needed to re-verify the file on its own.
pub fn compiled_json(cc: &CompiledCircuit) -> serde_json::Value {
    let mut v = serde_json::to_value(&cc.net).expect("network serializes");
    v["p"] = json!(cc.p);
    v["base_state"] = json!(cc.base_state.delta);
    let blocks: serde_json::Map<String, serde_json::Value> = cc
        .input_blocks
        .iter()
        .enumerate()
        .map(|(k, b)| (k.to_string(), json!(b)))
        .collect();
    v["input_blocks"] = serde_json::Value::Object(blocks);
    v["circuit"] = json!(cc.circuit.circuit().to_text());
    let labels: serde_json::Map<String, serde_json::Value> = cc
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| (i.to_string(), json!(l)))
        .collect();
    v["labels"] = serde_json::Value::Object(labels);
    v
}

/// Rebuild a compiled circuit from its JSON, trusting the stored network
/// and period (so deliberate corruption is observable by verification)
/// while re-deriving gadget metadata from the embedded circuit text.
pub fn compiled_from_json(v: &serde_json::Value) -> Result<CompiledCircuit, CompileError> {
    let net: FmNetwork =
        serde_json::from_value(v.clone()).map_err(|e| CompileError::Json(e.to_string()))?;
    let p = v["p"].as_u64().ok_or_else(|| CompileError::Json("missing p".into()))? as usize;
    let base: Vec<u32> = serde_json::from_value(v["base_state"].clone())
        .map_err(|e| CompileError::Json(format!("base_state: {e}")))?;
    let text = v["circuit"]
        .as_str()
        .ok_or_else(|| CompileError::Json("missing circuit text".into()))?;
    let circuit = parse_circuit(text)?;
    let alt = AlternatingCircuit::try_from_circuit(circuit)
        .map_err(CompileError::NotAlternating)?;
    let blocks_obj = v["input_blocks"]
        .as_object()
        .ok_or_else(|| CompileError::Json("missing input_blocks".into()))?;
    let mut input_blocks = vec![[0usize; 3]; blocks_obj.len()];
    for (k, arr) in blocks_obj {
        let idx: usize = k.parse().map_err(|_| CompileError::Json("bad block key".into()))?;
        let ids: Vec<usize> = serde_json::from_value(arr.clone())
            .map_err(|e| CompileError::Json(format!("input_blocks: {e}")))?;
        if ids.len() != 3 || idx >= input_blocks.len() {
            return Err(CompileError::Json("malformed input_blocks".into()));
        }
        input_blocks[idx] = [ids[0], ids[1], ids[2]];
    }
    let labels = match v.get("labels").and_then(|l| l.as_object()) {
        Some(obj) => {
            let mut ls = vec![String::new(); net.len()];
            for (k, val) in obj {
                let idx: usize =
                    k.parse().map_err(|_| CompileError::Json("bad label key".into()))?;
                ls[idx] = val.as_str().unwrap_or_default().to_string();
            }
            ls
        }
        None => (0..net.len()).map(|i| i.to_string()).collect(),
    };
    Ok(CompiledCircuit {
        base_state: FmState::new(base),
        input_blocks,
        gate_gadgets: BTreeMap::new(),
        p,
        stages: p / 3,
        labels,
        circuit: alt,
        net,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::normalize_alternating;

    fn alt(text: &str) -> AlternatingCircuit {
        normalize_alternating(&parse_circuit(text).unwrap())
    }

    const OR2: &str = "input x0\ninput x1\ng0 = or x0 x1\noutput x0 = g0\noutput x1 = g0\n";

    #[test]
    fn or_fixture_matches_figure_census() {
        let f = gate_fixture(GateKind::Or);
        // five blocks of 12 nodes
        assert_eq!(f.net.len(), 60);
        // 14 internal edges per block + 4 cross edges
        assert_eq!(f.edge_count(), 74);
        assert!(f.net.dt().iter().all(|&d| d == 2));
    }

    #[test]
    fn and_fixture_matches_figure_census() {
        let f = gate_fixture(GateKind::And);
        // five blocks + three relays with clocks + junction
        assert_eq!(f.net.len(), 73);
        // 70 block-internal + 12 relay-internal + 8 cross edges
        assert_eq!(f.edge_count(), 90);
    }

    #[test]
    fn base_state_cycles_with_period_three() {
        for kind in [GateKind::Or, GateKind::And] {
            let f = gate_fixture(kind);
            let t = crate::dynamics::find_attractor(&f.net, &f.base, 100).unwrap();
            assert_eq!((t.transient, t.period), (0, 3), "{kind:?}");
        }
    }

    #[test]
    fn or_gadget_truth_table_and_settle() {
        let f = gate_fixture(GateKind::Or);
        let settle = f.measure_settle(30).expect("or gadget settles");
        assert_eq!(settle, 3);
    }

    #[test]
    fn and_gadget_truth_table_and_settle() {
        let f = gate_fixture(GateKind::And);
        let settle = f.measure_settle(30).expect("and gadget settles");
        assert_eq!(settle, 6);
    }

    #[test]
    fn compile_or2_shape() {
        let cc = compile(&alt(OR2)).unwrap();
        // B0, B1, gate output block, two return wire blocks
        assert_eq!(cc.net.len(), 60);
        assert_eq!(cc.stages, 3);
        assert_eq!(cc.p, 9);
        assert!(cc.net.dt().iter().all(|&d| d == 2));
        assert!(cc
            .net
            .rules()
            .iter()
            .all(|r| r.kind == RuleKind::Conjunctive));
    }

    #[test]
    fn encode_decode_roundtrip() {
        let cc = compile(&alt(OR2)).unwrap();
        for mask in 0..4u32 {
            let x: Vec<bool> = (0..2).map(|i| mask >> i & 1 == 1).collect();
            let s = encode(&cc, &x);
            assert_eq!(decode(&cc, &s).unwrap(), x);
        }
        // all-zeros network state decodes as ill-formed
        let zero = FmState::new(vec![0; cc.net.len()]);
        let err = decode(&cc, &zero).unwrap_err();
        assert_eq!(err.block, 0);
        assert_eq!(err.observed, [0, 0, 0]);
    }

    #[test]
    fn decode_mid_cycle_is_ill_formed() {
        let cc = compile(&alt(OR2)).unwrap();
        let mut s = encode(&cc, &[true, false]);
        for t in 1..cc.p {
            s = cc.net.step(&s);
            if t % 3 != 0 {
                // path values are mid-rotation: decoding must fail
                assert!(decode(&cc, &s).is_err(), "t={t}");
            }
        }
    }

    #[test]
    fn simulate_or2_one_iteration() {
        let cc = compile(&alt(OR2)).unwrap();
        for mask in 0..4u32 {
            let x: Vec<bool> = (0..2).map(|i| mask >> i & 1 == 1).collect();
            let got = simulate_iterations(&cc, &x, 1).unwrap();
            assert_eq!(got, cc.circuit.eval(&x), "mask {mask}");
        }
    }

    #[test]
    fn simulate_swap_matches_iterate() {
        let swap = "input x0\ninput x1\ng0 = or x1 x1\ng1 = or x0 x0\noutput x0 = g0\noutput x1 = g1\n";
        let a = alt(swap);
        let cc = compile(&a).unwrap();
        for t in 0..=4 {
            for mask in 0..4u32 {
                let x: Vec<bool> = (0..2).map(|i| mask >> i & 1 == 1).collect();
                assert_eq!(
                    simulate_iterations(&cc, &x, t).unwrap(),
                    a.circuit().iterate(&x, t),
                    "t={t} mask={mask}"
                );
            }
        }
    }

    #[test]
    fn and_circuit_simulates() {
        let text = "input a\ninput b\ng = and a b\noutput a = g\noutput b = g\n";
        let a = alt(text);
        let cc = compile(&a).unwrap();
        for t in 0..=3 {
            for mask in 0..4u32 {
                let x: Vec<bool> = (0..2).map(|i| mask >> i & 1 == 1).collect();
                assert_eq!(
                    simulate_iterations(&cc, &x, t).unwrap(),
                    a.circuit().iterate(&x, t),
                    "t={t} mask={mask}"
                );
            }
        }
    }

    #[test]
    fn identity_circuit_decodes_identity() {
        let text = "input a\ng = or a a\noutput a = g\n";
        let a = alt(text);
        let cc = compile(&a).unwrap();
        for v in [false, true] {
            assert_eq!(simulate_iterations(&cc, &[v], 1).unwrap(), vec![v]);
            assert_eq!(simulate_iterations(&cc, &[v], 0).unwrap(), vec![v]);
        }
    }

    #[test]
    fn reduction_agrees_with_circuit_prediction() {
        let swap = "input x0\ninput x1\ng0 = or x1 x1\ng1 = or x0 x0\noutput x0 = g0\noutput x1 = g1\n";
        let a = alt(swap);
        for mask in 0..4u32 {
            let x: Vec<bool> = (0..2).map(|i| mask >> i & 1 == 1).collect();
            for i in 0..2 {
                let inst = reduce_prediction(&a, &x, i).unwrap();
                let fm = inst.fm_predict();
                let circ = crate::circuit::iter_circuit_predict(a.circuit(), &x, i);
                assert_eq!(fm.answer, circ.answer, "x={x:?} i={i}");
            }
        }
    }

    #[test]
    fn compiled_json_roundtrip_simulates() {
        let cc = compile(&alt(OR2)).unwrap();
        let v = compiled_json(&cc);
        assert_eq!(v["p"], 9);
        assert!(v["input_blocks"]["0"].is_array());
        let back = compiled_from_json(&v).unwrap();
        assert_eq!(back.p, cc.p);
        for mask in 0..4u32 {
            let x: Vec<bool> = (0..2).map(|i| mask >> i & 1 == 1).collect();
            assert_eq!(
                simulate_iterations(&back, &x, 2).unwrap(),
                simulate_iterations(&cc, &x, 2).unwrap()
            );
        }
    }

    #[test]
    fn compile_rejects_non_alternating() {
        let c = parse_circuit("input a\ninput b\ng = and a b\noutput a = g\noutput b = g\n")
            .unwrap();
        assert!(matches!(
            compile_circuit(&c),
            Err(CompileError::NotAlternating(_))
        ));
    }
}
