//! Monotone boolean circuits: text format, iterated evaluation, the
//! circuit-side prediction problem, and normalization into the
//! alternating degree-4 form the network compiler consumes.
//!
//! Text format, one statement per line (`#` starts a comment, identifiers
//! are `[A-Za-z0-9_]+`):
//!
//! ```text
//! input <name>
//! <gid> = and <a> <b>
//! <gid> = or <a> <b>
//! output <inputname> = <gid>
//! ```
//!
//! `and`/`or` also accept a single argument (identity gates, produced by
//! the normalizer). Every input must receive exactly one `output` line;
//! output `k` feeds input `k` on the next iteration.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("syntax error on line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("negation rejected on line {line}: circuit must be monotone")]
    NegationRejected { line: usize },
    #[error("unknown identifier {name:?}")]
    UnknownIdentifier { name: String },
    #[error("cycle detected among gates")]
    CycleDetected,
    #[error("output arity mismatch: {0}")]
    OutputArityMismatch(String),
}

/// Reference to a value producer: a circuit input or a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ref {
    Input(usize),
    Gate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub args: Vec<Ref>,
}

/// A monotone circuit with as many outputs as inputs, iterated by feeding
/// output `k` back into input `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneCircuit {
    n_inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<Ref>,
    input_names: Vec<String>,
    topo: Vec<usize>,
}

impl MonotoneCircuit {
    /// Validate a hand-built circuit: nonempty inputs, one output per
    /// input, at least one argument per gate, all references in range,
    /// acyclic gate graph.
    pub fn new(
        n_inputs: usize,
        gates: Vec<Gate>,
        outputs: Vec<Ref>,
        input_names: Option<Vec<String>>,
    ) -> Result<Self, CircuitError> {
        if n_inputs == 0 {
            return Err(CircuitError::OutputArityMismatch(
                "circuit has no inputs".into(),
            ));
        }
        if outputs.len() != n_inputs {
            return Err(CircuitError::OutputArityMismatch(format!(
                "{} outputs for {} inputs",
                outputs.len(),
                n_inputs
            )));
        }
        let check = |r: &Ref| -> Result<(), CircuitError> {
            match *r {
                Ref::Input(i) if i >= n_inputs => Err(CircuitError::UnknownIdentifier {
                    name: format!("input#{i}"),
                }),
                Ref::Gate(g) if g >= gates.len() => Err(CircuitError::UnknownIdentifier {
                    name: format!("gate#{g}"),
                }),
                _ => Ok(()),
            }
        };
        for (gi, g) in gates.iter().enumerate() {
            if g.args.is_empty() {
                return Err(CircuitError::Syntax {
                    line: 0,
                    msg: format!("gate #{gi} has no arguments"),
                });
            }
            for a in &g.args {
                check(a)?;
            }
        }
        for o in &outputs {
            check(o)?;
        }
        let topo = toposort(&gates)?;
        let input_names = input_names
            .unwrap_or_else(|| (0..n_inputs).map(|i| format!("x{i}")).collect());
        Ok(MonotoneCircuit { n_inputs, gates, outputs, input_names, topo })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[Ref] {
        &self.outputs
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    /// Gate indices in topological order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// One application of the circuit map, by topological evaluation.
    pub fn eval(&self, x: &[bool]) -> Vec<bool> {
        assert_eq!(x.len(), self.n_inputs, "input width mismatch");
        let mut vals = vec![false; self.gates.len()];
        for &gi in &self.topo {
            let g = &self.gates[gi];
            let read = |r: &Ref| match *r {
                Ref::Input(i) => x[i],
                Ref::Gate(j) => vals[j],
            };
            vals[gi] = match g.kind {
                GateKind::And => g.args.iter().all(read),
                GateKind::Or => g.args.iter().any(read),
            };
        }
        self.outputs
            .iter()
            .map(|r| match *r {
                Ref::Input(i) => x[i],
                Ref::Gate(j) => vals[j],
            })
            .collect()
    }

    /// `t`-fold composition of `eval` through the output-input
    /// identification.
    pub fn iterate(&self, x0: &[bool], t: usize) -> Vec<bool> {
        let mut x = x0.to_vec();
        for _ in 0..t {
            x = self.eval(&x);
        }
        x
    }

    /// Render in the line format; parsing the result reproduces the
    /// circuit up to gate naming.
    pub fn to_text(&self) -> String {
        let mut prefix = "g".to_string();
        while self
            .input_names
            .iter()
            .any(|n| n.starts_with(&prefix) && n[prefix.len()..].chars().all(|c| c.is_ascii_digit()) && n.len() > prefix.len())
        {
            prefix.push('g');
        }
        let name = |r: &Ref| match *r {
            Ref::Input(i) => self.input_names[i].clone(),
            Ref::Gate(j) => format!("{prefix}{j}"),
        };
        let mut out = String::new();
        for n in &self.input_names {
            let _ = writeln!(out, "input {n}");
        }
        for &gi in &self.topo {
            let g = &self.gates[gi];
            let kind = match g.kind {
                GateKind::And => "and",
                GateKind::Or => "or",
            };
            let args: Vec<String> = g.args.iter().map(&name).collect();
            let _ = writeln!(out, "{prefix}{gi} = {kind} {}", args.join(" "));
        }
        for (i, o) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "output {} = {}", self.input_names[i], name(o));
        }
        out
    }
}

fn toposort(gates: &[Gate]) -> Result<Vec<usize>, CircuitError> {
    let n = gates.len();
    let mut indeg = vec![0usize; n];
    for g in gates {
        for a in &g.args {
            if let Ref::Gate(_) = a {
                // counted on the consumer side below
            }
        }
    }
    // edges: arg gate -> consumer gate
    let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (gi, g) in gates.iter().enumerate() {
        for a in &g.args {
            if let Ref::Gate(j) = *a {
                consumers[j].push(gi);
                indeg[gi] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(gi) = queue.pop() {
        order.push(gi);
        for &c in &consumers[gi] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push(c);
            }
        }
    }
    if order.len() != n {
        return Err(CircuitError::CycleDetected);
    }
    Ok(order)
}

/// Parse the line format.
pub fn parse_circuit(text: &str) -> Result<MonotoneCircuit, CircuitError> {
    fn valid_ident(s: &str) -> bool {
        !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    }

    enum Decl {
        Gate { kind: GateKind, args: Vec<String> },
    }

    let mut input_names: Vec<String> = Vec::new();
    let mut gate_decls: Vec<(String, Decl)> = Vec::new();
    let mut output_decls: Vec<(String, String, usize)> = Vec::new();
    let mut names: HashMap<String, ()> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stmt = raw.split('#').next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let toks: Vec<&str> = stmt.split_whitespace().collect();
        match toks.as_slice() {
            ["input", name] => {
                if !valid_ident(name) {
                    return Err(CircuitError::Syntax {
                        line,
                        msg: format!("bad identifier {name:?}"),
                    });
                }
                if names.insert(name.to_string(), ()).is_some() {
                    return Err(CircuitError::Syntax {
                        line,
                        msg: format!("identifier {name:?} already defined"),
                    });
                }
                input_names.push(name.to_string());
            }
            ["output", name, "=", gid] => {
                if !valid_ident(name) || !valid_ident(gid) {
                    return Err(CircuitError::Syntax { line, msg: "bad identifier".into() });
                }
                output_decls.push((name.to_string(), gid.to_string(), line));
            }
            [name, "=", op, args @ ..] => {
                if *op == "not" {
                    return Err(CircuitError::NegationRejected { line });
                }
                let kind = match *op {
                    "and" => GateKind::And,
                    "or" => GateKind::Or,
                    other => {
                        return Err(CircuitError::Syntax {
                            line,
                            msg: format!("unknown operation {other:?}"),
                        })
                    }
                };
                if args.is_empty() || args.len() > 2 {
                    return Err(CircuitError::Syntax {
                        line,
                        msg: format!("{op} takes one or two arguments, got {}", args.len()),
                    });
                }
                if args.contains(&"not") {
                    return Err(CircuitError::NegationRejected { line });
                }
                if !valid_ident(name) || args.iter().any(|a| !valid_ident(a)) {
                    return Err(CircuitError::Syntax { line, msg: "bad identifier".into() });
                }
                if names.insert(name.to_string(), ()).is_some() {
                    return Err(CircuitError::Syntax {
                        line,
                        msg: format!("identifier {name:?} already defined"),
                    });
                }
                gate_decls.push((
                    name.to_string(),
                    Decl::Gate { kind, args: args.iter().map(|s| s.to_string()).collect() },
                ));
            }
            _ => {
                return Err(CircuitError::Syntax {
                    line,
                    msg: format!("unrecognized statement {stmt:?}"),
                })
            }
        }
    }

    if input_names.is_empty() {
        return Err(CircuitError::OutputArityMismatch(
            "circuit declares no inputs".into(),
        ));
    }

    let input_index: HashMap<&str, usize> = input_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let gate_index: HashMap<&str, usize> = gate_decls
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.as_str(), i))
        .collect();
    let resolve = |name: &str| -> Result<Ref, CircuitError> {
        if let Some(&i) = input_index.get(name) {
            Ok(Ref::Input(i))
        } else if let Some(&g) = gate_index.get(name) {
            Ok(Ref::Gate(g))
        } else {
            Err(CircuitError::UnknownIdentifier { name: name.to_string() })
        }
    };

    let mut gates = Vec::with_capacity(gate_decls.len());
    for (_, Decl::Gate { kind, args }) in &gate_decls {
        let args = args
            .iter()
            .map(|a| resolve(a))
            .collect::<Result<Vec<_>, _>>()?;
        gates.push(Gate { kind: *kind, args });
    }

    let mut outputs: Vec<Option<Ref>> = vec![None; input_names.len()];
    for (name, gid, line) in &output_decls {
        let Some(&i) = input_index.get(name.as_str()) else {
            return Err(CircuitError::Syntax {
                line: *line,
                msg: format!("output target {name:?} is not an input"),
            });
        };
        if outputs[i].is_some() {
            return Err(CircuitError::OutputArityMismatch(format!(
                "input {name:?} assigned more than one output"
            )));
        }
        outputs[i] = Some(resolve(gid)?);
    }
    let outputs = outputs
        .into_iter()
        .enumerate()
        .map(|(i, o)| {
            o.ok_or_else(|| {
                CircuitError::OutputArityMismatch(format!(
                    "input {:?} has no output assignment",
                    input_names[i]
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    MonotoneCircuit::new(input_names.len(), gates, outputs, Some(input_names))
}

/// Outcome of the circuit-side prediction question: is there a `t >= 1`
/// with `C^t(x)_i = 1`?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitPrediction {
    pub answer: bool,
    pub witness_time: Option<u64>,
}

/// Decide by iterating until the boolean trajectory repeats; the state
/// space is finite so this terminates within `2^n` iterations.
pub fn iter_circuit_predict(c: &MonotoneCircuit, x0: &[bool], i: usize) -> CircuitPrediction {
    assert!(i < c.n_inputs(), "monitored index out of range");
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut x = x0.to_vec();
    let mut t = 0u64;
    loop {
        if seen.insert(x.clone(), t as usize).is_some() {
            return CircuitPrediction { answer: false, witness_time: None };
        }
        x = c.eval(&x);
        t += 1;
        if x[i] {
            return CircuitPrediction { answer: true, witness_time: Some(t) };
        }
    }
}

// --- alternating form -----------------------------------------------------

/// Why a circuit fails the alternating-form validator.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AltViolation {
    #[error("input {0} has out-degree {1}, expected 1")]
    InputFanOut(usize, usize),
    #[error("input {input} feeds a non-OR gate {gate}")]
    InputIntoNonOr { input: usize, gate: usize },
    #[error("output {0} is not an OR gate")]
    OutputNotOr(usize),
    #[error("adjacent gates {0} and {1} have the same kind")]
    NoAlternation(usize, usize),
    #[error("gate {gate} has degree {degree} > 4")]
    DegreeTooHigh { gate: usize, degree: usize },
    #[error("gate {gate} at layer {layer} has the wrong kind for its parity")]
    LayerParity { gate: usize, layer: usize },
}

/// A monotone circuit satisfying the alternating degree-4 discipline:
/// inputs feed OR gates only and have out-degree 1, gate kinds alternate
/// along every path (OR at even layers, AND at odd, where layer 0 holds
/// the gates adjacent to inputs), outputs are OR gates, and every gate
/// has total degree at most 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingCircuit(MonotoneCircuit);

impl AlternatingCircuit {
    pub fn try_from_circuit(c: MonotoneCircuit) -> Result<Self, AltViolation> {
        validate_alternating(&c)?;
        Ok(AlternatingCircuit(c))
    }

    pub fn circuit(&self) -> &MonotoneCircuit {
        &self.0
    }

    pub fn into_circuit(self) -> MonotoneCircuit {
        self.0
    }
}

impl std::ops::Deref for AlternatingCircuit {
    type Target = MonotoneCircuit;
    fn deref(&self) -> &MonotoneCircuit {
        &self.0
    }
}

/// Shortest-path layer per gate: layer 0 holds gates reading an input
/// directly; a gate's layer is `1 + min` over its gate arguments.
pub fn gate_layers(c: &MonotoneCircuit) -> Vec<usize> {
    let mut layer = vec![usize::MAX; c.gates().len()];
    for &gi in c.topo_order() {
        let mut best = usize::MAX;
        for a in &c.gates()[gi].args {
            let cand = match *a {
                Ref::Input(_) => 0,
                Ref::Gate(j) => layer[j].saturating_add(1),
            };
            best = best.min(cand);
        }
        layer[gi] = best;
    }
    layer
}

/// Structural check of every AlternatingCircuit invariant.
pub fn validate_alternating(c: &MonotoneCircuit) -> Result<(), AltViolation> {
    let gates = c.gates();
    let mut out_deg_gate = vec![0usize; gates.len()];
    let mut out_deg_input = vec![0usize; c.n_inputs()];
    for g in gates {
        for a in &g.args {
            match *a {
                Ref::Input(i) => out_deg_input[i] += 1,
                Ref::Gate(j) => out_deg_gate[j] += 1,
            }
        }
    }
    for o in c.outputs() {
        match *o {
            Ref::Input(i) => out_deg_input[i] += 1,
            Ref::Gate(j) => out_deg_gate[j] += 1,
        }
    }

    for (i, &deg) in out_deg_input.iter().enumerate() {
        if deg != 1 {
            return Err(AltViolation::InputFanOut(i, deg));
        }
    }
    for (gi, g) in gates.iter().enumerate() {
        for a in &g.args {
            match *a {
                Ref::Input(i) if g.kind != GateKind::Or => {
                    return Err(AltViolation::InputIntoNonOr { input: i, gate: gi })
                }
                Ref::Gate(j) if gates[j].kind == g.kind => {
                    return Err(AltViolation::NoAlternation(j, gi))
                }
                _ => {}
            }
        }
        let degree = g.args.len() + out_deg_gate[gi];
        if degree > 4 {
            return Err(AltViolation::DegreeTooHigh { gate: gi, degree });
        }
    }
    for o in c.outputs() {
        match *o {
            Ref::Gate(j) if gates[j].kind == GateKind::Or => {}
            Ref::Gate(j) => return Err(AltViolation::OutputNotOr(j)),
            Ref::Input(i) => return Err(AltViolation::OutputNotOr(i)),
        }
    }
    let layers = gate_layers(c);
    for (gi, g) in gates.iter().enumerate() {
        let want = if layers[gi].is_multiple_of(2) { GateKind::Or } else { GateKind::And };
        if g.kind != want {
            return Err(AltViolation::LayerParity { gate: gi, layer: layers[gi] });
        }
    }
    Ok(())
}

// --- normalization -----------------------------------------------------

// Working IR for the normalizer. `Id` nodes materialize as one-argument
// gates whose kind is dictated by their level's parity.
#[derive(Clone, Copy, PartialEq, Eq)]
enum IrKind {
    And,
    Or,
    Id,
}

struct IrGate {
    kind: IrKind,
    args: Vec<Ref>, // Ref::Gate indexes IR gates
}

/// Rewrite any monotone circuit into a semantically equivalent
/// [`AlternatingCircuit`].
///
/// The result is strictly layered: every wire spans exactly one level, so
/// levels alternate OR (odd, counting inputs as level 0) and AND (even).
/// Fan-out above 2 goes through duplicator trees of identity gates,
/// arity above 2 through binary gate trees, level gaps through identity
/// chains, and an unused input is absorbed into its own output via
/// `out = or(g, and(x, g))`, which leaves the value unchanged.
pub fn normalize_alternating(c: &MonotoneCircuit) -> AlternatingCircuit {
    // -- IR construction: dedupe args, binarize arity > 2 --
    let mut ir: Vec<IrGate> = Vec::new();
    let mut orig_to_ir: Vec<usize> = vec![usize::MAX; c.gates().len()];
    for &gi in c.topo_order() {
        let g = &c.gates()[gi];
        let mut args: Vec<Ref> = Vec::new();
        for a in &g.args {
            let r = match *a {
                Ref::Input(i) => Ref::Input(i),
                Ref::Gate(j) => Ref::Gate(orig_to_ir[j]),
            };
            if !args.contains(&r) {
                args.push(r);
            }
        }
        let kind = match g.kind {
            GateKind::And => IrKind::And,
            GateKind::Or => IrKind::Or,
        };
        // left-associated binary tree over the deduplicated arguments
        let mut acc = args[0];
        for &next in &args[1..] {
            ir.push(IrGate { kind, args: vec![acc, next] });
            acc = Ref::Gate(ir.len() - 1);
        }
        if args.len() == 1 {
            ir.push(IrGate { kind, args: vec![acc] });
            acc = Ref::Gate(ir.len() - 1);
        }
        orig_to_ir[gi] = match acc {
            Ref::Gate(j) => j,
            Ref::Input(_) => unreachable!("gate reduces to a gate"),
        };
    }
    let map_ref = |r: &Ref| match *r {
        Ref::Input(i) => Ref::Input(i),
        Ref::Gate(j) => Ref::Gate(orig_to_ir[j]),
    };
    let mut outputs: Vec<Ref> = c.outputs().iter().map(map_ref).collect();

    // -- drop dead gates --
    let mut live = vec![false; ir.len()];
    let mut stack: Vec<usize> = outputs
        .iter()
        .filter_map(|r| match *r {
            Ref::Gate(j) => Some(j),
            _ => None,
        })
        .collect();
    while let Some(j) = stack.pop() {
        if live[j] {
            continue;
        }
        live[j] = true;
        for a in &ir[j].args {
            if let Ref::Gate(k) = *a {
                stack.push(k);
            }
        }
    }
    let remap: Vec<usize> = {
        let mut m = vec![usize::MAX; ir.len()];
        let mut next = 0;
        for (j, &l) in live.iter().enumerate() {
            if l {
                m[j] = next;
                next += 1;
            }
        }
        m
    };
    let mut ir: Vec<IrGate> = ir
        .into_iter()
        .enumerate()
        .filter(|(j, _)| live[*j])
        .map(|(_, mut g)| {
            for a in &mut g.args {
                if let Ref::Gate(k) = a {
                    *k = remap[*k];
                }
            }
            g
        })
        .collect();
    for o in &mut outputs {
        if let Ref::Gate(j) = o {
            *j = remap[*j];
        }
    }

    // -- absorb unused inputs: out_k := or(o_k, and(x_k, o_k)) --
    let mut used = vec![false; c.n_inputs()];
    for g in &ir {
        for a in &g.args {
            if let Ref::Input(i) = *a {
                used[i] = true;
            }
        }
    }
    for o in &outputs {
        if let Ref::Input(i) = *o {
            used[i] = true;
        }
    }
    for i in 0..c.n_inputs() {
        if !used[i] {
            let o = outputs[i];
            ir.push(IrGate { kind: IrKind::And, args: vec![Ref::Input(i), o] });
            let a = Ref::Gate(ir.len() - 1);
            ir.push(IrGate { kind: IrKind::Or, args: vec![o, a] });
            outputs[i] = Ref::Gate(ir.len() - 1);
        }
    }

    // -- fan-out trees: cap consumers at 2 per gate, 1 per input --
    let ir_len = ir.len();
    let mut consumers: HashMap<Ref, Vec<(usize, usize)>> = HashMap::new(); // -> (gate, arg slot); gate==usize::MAX is the output list
    for (j, g) in ir.iter().enumerate() {
        for (slot, a) in g.args.iter().enumerate() {
            consumers.entry(*a).or_default().push((j, slot));
        }
    }
    for (slot, o) in outputs.iter().enumerate() {
        consumers.entry(*o).or_default().push((usize::MAX, slot));
    }
    let mut rewire: Vec<(usize, usize, Ref)> = Vec::new();
    for j in 0..ir_len {
        let src = Ref::Gate(j);
        let cons = consumers.get(&src).cloned().unwrap_or_default();
        if cons.len() > 2 {
            split_consumers(&mut ir, src, &cons, &mut rewire);
        }
    }
    for i in 0..c.n_inputs() {
        let src = Ref::Input(i);
        let cons = consumers.get(&src).cloned().unwrap_or_default();
        if cons.len() > 1 {
            split_consumers(&mut ir, src, &cons, &mut rewire);
        }
    }
    for (gate, slot, new_ref) in rewire {
        if gate == usize::MAX {
            outputs[slot] = new_ref;
        } else {
            ir[gate].args[slot] = new_ref;
        }
    }

    // -- level assignment --
    let order = ir_toposort(&ir);
    let mut level = vec![0u32; ir.len()];
    for &j in &order {
        let base = ir[j]
            .args
            .iter()
            .map(|a| match *a {
                Ref::Input(_) => 0,
                Ref::Gate(k) => level[k],
            })
            .max()
            .expect("ir gates have arguments")
            + 1;
        level[j] = match ir[j].kind {
            IrKind::Id => base,
            IrKind::Or => {
                if base % 2 == 1 {
                    base
                } else {
                    base + 1
                }
            }
            IrKind::And => {
                if base % 2 == 0 {
                    base
                } else {
                    base + 1
                }
            }
        };
    }

    // -- materialize with identity chains across level gaps --
    let mut m = Materializer {
        gates: Vec::new(),
        pools: HashMap::new(),
        level: &level,
    };
    let mut final_of_ir: Vec<Ref> = vec![Ref::Input(0); ir.len()];
    for &j in &order {
        let lv = level[j];
        let args: Vec<Ref> = ir[j]
            .args
            .iter()
            .map(|a| {
                let fr = match *a {
                    Ref::Input(i) => SourceRef { base: Ref::Input(i), base_level: 0 },
                    Ref::Gate(k) => SourceRef { base: final_of_ir[k], base_level: level[k] },
                };
                m.provide(fr, lv - 1)
            })
            .collect();
        let kind = match ir[j].kind {
            IrKind::And => GateKind::And,
            IrKind::Or => GateKind::Or,
            IrKind::Id => {
                if lv % 2 == 1 {
                    GateKind::Or
                } else {
                    GateKind::And
                }
            }
        };
        m.gates.push(Gate { kind, args });
        final_of_ir[j] = Ref::Gate(m.gates.len() - 1);
    }

    // -- outputs must be OR gates --
    let final_outputs: Vec<Ref> = outputs
        .iter()
        .map(|o| {
            let src = match *o {
                Ref::Input(i) => SourceRef { base: Ref::Input(i), base_level: 0 },
                Ref::Gate(j) => SourceRef { base: final_of_ir[j], base_level: level[j] },
            };
            let lv = if src.base_level % 2 == 1 { src.base_level } else { src.base_level + 1 };
            m.provide(src, lv)
        })
        .collect();

    let gates = m.gates;
    let normalized = MonotoneCircuit::new(
        c.n_inputs(),
        gates,
        final_outputs,
        Some(c.input_names().to_vec()),
    )
    .expect("normalizer emits a valid circuit");
    debug_assert_eq!(
        validate_alternating(&normalized),
        Ok(()),
        "normalizer emits an alternating circuit"
    );
    AlternatingCircuit(normalized)
}

/// Rewire > 2 consumers of `src` through a balanced tree of identity
/// gates, each serving at most two consumers (one, for an input source).
fn split_consumers(
    ir: &mut Vec<IrGate>,
    src: Ref,
    cons: &[(usize, usize)],
    rewire: &mut Vec<(usize, usize, Ref)>,
) {
    // Layer of identity copies fans 1 -> 2 until enough leaves exist.
    let mut frontier = vec![src];
    let cap = |r: Ref| match r {
        Ref::Input(_) => 1usize,
        Ref::Gate(_) => 2,
    };
    while frontier.iter().map(|&r| cap(r)).sum::<usize>() < cons.len() {
        let mut next = Vec::new();
        for &f in &frontier {
            for _ in 0..cap(f) {
                ir.push(IrGate { kind: IrKind::Id, args: vec![f] });
                next.push(Ref::Gate(ir.len() - 1));
            }
        }
        frontier = next;
    }
    let mut slots: Vec<Ref> = Vec::with_capacity(cons.len());
    for &f in &frontier {
        for _ in 0..cap(f) {
            slots.push(f);
        }
    }
    for (&(gate, slot), &leaf) in cons.iter().zip(&slots) {
        if leaf != src {
            rewire.push((gate, slot, leaf));
        }
    }
}

fn ir_toposort(ir: &[IrGate]) -> Vec<usize> {
    let n = ir.len();
    let mut indeg = vec![0usize; n];
    let mut consumers: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, g) in ir.iter().enumerate() {
        for a in &g.args {
            if let Ref::Gate(k) = *a {
                consumers[k].push(j);
                indeg[j] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&j| indeg[j] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(j) = queue.pop() {
        order.push(j);
        for &c in &consumers[j] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                queue.push(c);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "IR is acyclic");
    order
}

#[derive(Clone, Copy)]
struct SourceRef {
    base: Ref,
    base_level: u32,
}

struct Materializer<'a> {
    gates: Vec<Gate>,
    /// (base ref, level) -> identity node already built at that level.
    pools: HashMap<(Ref, u32), Ref>,
    #[allow(dead_code)]
    level: &'a [u32],
}

impl Materializer<'_> {
    /// A final ref carrying `src`'s value at exactly `want` levels; level
    /// gaps are bridged with one-argument gates of the level's parity
    /// kind. Fan-out feasibility is guaranteed by the earlier tree pass.
    fn provide(&mut self, src: SourceRef, want: u32) -> Ref {
        if want == src.base_level {
            return src.base;
        }
        debug_assert!(want > src.base_level);
        if let Some(&r) = self.pools.get(&(src.base, want)) {
            return r;
        }
        let below = self.provide(src, want - 1);
        let kind = if want % 2 == 1 { GateKind::Or } else { GateKind::And };
        self.gates.push(Gate { kind, args: vec![below] });
        let r = Ref::Gate(self.gates.len() - 1);
        self.pools.insert((src.base, want), r);
        r
    }
}
