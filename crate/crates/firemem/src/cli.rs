//! Command-line front end: every subcommand is a thin wrapper over the
//! library, reading the JSON formats and emitting machine-readable
//! reports.
//!
//! Exit code 0 means an answer was computed — including negative answers
//! like "the node never flips" or "verification found a mismatch".
//! Nonzero is reserved for operational errors (missing files, malformed
//! input, exhausted budgets). `FIREMEM_BUDGET` overrides the default
//! state-enumeration budget.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::circuit::{normalize_alternating, parse_circuit, AlternatingCircuit};
use crate::compiler::{compile, compiled_from_json, compiled_json, simulate_iterations};
use crate::dynamics::{
    brute_force_census_parallel, find_attractor, predict, PredictionQuery, DEFAULT_BUDGET,
};
use crate::gadgets::{
    build_block_cycle, build_clock_network, build_prime_union_hetero_with,
    build_prime_union_uniform, verify_claimed_period, ClaimedPeriod, ConnectorStyle,
    GadgetInstance, HeteroOptions,
};
use crate::net::{FmNetwork, FmState};

#[derive(Parser, Debug)]
#[command(name = "firemem", version, about = "Boolean networks with firing memory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum GadgetKind {
    Clock,
    BlockCycle,
    PrimeUnionHetero,
    PrimeUnionUniform,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact N-step trace from a state, one JSON state per line
    /// (the initial state is echoed first).
    Step {
        network: PathBuf,
        state: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: u64,
        /// Also write the interaction graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Transient length and period of the trajectory from a state.
    Attractor {
        network: PathBuf,
        state: PathBuf,
    },
    /// Decide whether a node's boolean state ever flips.
    Predict {
        network: PathBuf,
        state: PathBuf,
        #[arg(long)]
        node: usize,
    },
    /// Enumerate every canonical state: attractors and basin sizes.
    Census {
        network: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Construct a gadget: <out>.network.json + <out>.state.json.
    BuildGadget {
        #[arg(long, value_enum)]
        kind: GadgetKind,
        #[arg(long)]
        tau: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        /// Comma-separated primes for the prime-union kinds.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        /// Size components as K_p with delay p-1 (period exactly p).
        #[arg(long)]
        coprime_fix: bool,
        /// Join heterogeneous components by the bare one-way edge instead
        /// of a buffered relay (demonstrates the collapse on coprime
        /// component periods).
        #[arg(long)]
        verbatim_edge: bool,
        /// Output path prefix.
        #[arg(long)]
        out: String,
        /// Also write <out>.dot with role labels.
        #[arg(long)]
        dot: bool,
    },
    /// Compile a circuit text file into a conjunctive delay-2 network.
    Compile {
        circuit: PathBuf,
        /// Normalize into alternating degree-4 form first.
        #[arg(long)]
        normalize: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Replay a compiled network against its embedded circuit.
    VerifySim {
        compiled: PathBuf,
        /// Check every input vector (default up to 12 inputs).
        #[arg(long)]
        exhaustive: bool,
        /// Check this many sampled input vectors instead.
        #[arg(long)]
        samples: Option<usize>,
        /// Iterations to verify per input vector.
        #[arg(long, default_value_t = 4)]
        t: usize,
        /// Spread the input vectors over this many worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Deterministic run record: the same inputs always produce the same
/// `command`/`inputs`/`report` triple; wall-clock time stays outside the
/// digestable payload.
#[derive(Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub report: serde_json::Value,
    pub wall_clock_ms: f64,
}

impl RunReport {
    /// Digest of everything except the wall clock.
    pub fn digest(&self) -> String {
        let payload = json!({
            "command": self.command,
            "inputs": self.inputs,
            "report": self.report,
        });
        hex_digest(payload.to_string().as_bytes())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes =
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex_digest(&bytes))
}

fn load_network(path: &Path) -> Result<FmNetwork> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing network {}", path.display()))
}

fn load_state(path: &Path, net: &FmNetwork) -> Result<FmState> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let s: FmState = serde_json::from_str(&text)
        .with_context(|| format!("parsing state {}", path.display()))?;
    net.check_state(&s.delta)
        .with_context(|| format!("state {} does not fit the network", path.display()))?;
    Ok(s)
}

pub fn budget() -> u64 {
    std::env::var("FIREMEM_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Execute a parsed command, writing machine-readable output to `out`.
pub fn run<W: Write>(cli: Cli, out: &mut W) -> Result<()> {
    let echo: Vec<String> = std::env::args().collect();
    match cli.command {
        Command::Step { network, state, steps, dot } => {
            let net = load_network(&network)?;
            let s0 = load_state(&state, &net)?;
            if let Some(dot_path) = dot {
                std::fs::write(&dot_path, net.to_dot(None))
                    .with_context(|| format!("writing {}", dot_path.display()))?;
            }
            let mut s = s0;
            writeln!(out, "{}", serde_json::to_string(&s)?)?;
            for _ in 0..steps {
                s = net.step(&s);
                writeln!(out, "{}", serde_json::to_string(&s)?)?;
            }
        }
        Command::Attractor { network, state } => {
            let start = Instant::now();
            let net = load_network(&network)?;
            let s0 = load_state(&state, &net)?;
            let t = find_attractor(&net, &s0, budget())?;
            let report = RunReport {
                command: echo,
                inputs: input_digests(&[&network, &state])?,
                report: json!({
                    "transient": t.transient,
                    "period": t.period,
                }),
                wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
        Command::Predict { network, state, node } => {
            let start = Instant::now();
            let net = load_network(&network)?;
            let s0 = load_state(&state, &net)?;
            if node >= net.len() {
                bail!("node {node} out of range for a {}-node network", net.len());
            }
            let p = predict(&PredictionQuery { net: &net, node, initial: s0 });
            let report = RunReport {
                command: echo,
                inputs: input_digests(&[&network, &state])?,
                report: json!({
                    "answer": p.answer,
                    "witness_time": p.witness_time,
                }),
                wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
        Command::Census { network, jobs } => {
            let net = load_network(&network)?;
            let rows = brute_force_census_parallel(&net, budget(), jobs.max(1))?;
            writeln!(out, "{}", serde_json::to_string(&rows)?)?;
        }
        Command::BuildGadget {
            kind,
            tau,
            k,
            primes,
            coprime_fix,
            verbatim_edge,
            out: prefix,
            dot,
        } => {
            let start = Instant::now();
            let g: GadgetInstance = match kind {
                GadgetKind::Clock => build_clock_network(tau.context("--tau required")?)?,
                GadgetKind::BlockCycle => build_block_cycle(
                    tau.context("--tau required")?,
                    k.context("--k required")?,
                )?,
                GadgetKind::PrimeUnionHetero => build_prime_union_hetero_with(
                    &primes,
                    HeteroOptions {
                        coprime_fix,
                        connector: if verbatim_edge {
                            ConnectorStyle::DirectEdge
                        } else {
                            ConnectorStyle::Buffered
                        },
                    },
                )?,
                GadgetKind::PrimeUnionUniform => build_prime_union_uniform(
                    tau.context("--tau required")?,
                    &primes,
                )?,
            };
            let net_path = format!("{prefix}.network.json");
            let state_path = format!("{prefix}.state.json");
            std::fs::write(&net_path, serde_json::to_string_pretty(&g.network_json())?)
                .with_context(|| format!("writing {net_path}"))?;
            std::fs::write(&state_path, serde_json::to_string_pretty(&g.state_json())?)
                .with_context(|| format!("writing {state_path}"))?;
            if dot {
                let dot_path = format!("{prefix}.dot");
                std::fs::write(&dot_path, g.to_dot())
                    .with_context(|| format!("writing {dot_path}"))?;
            }
            let report = RunReport {
                command: echo,
                inputs: BTreeMap::new(),
                report: json!({
                    "nodes": g.net.len(),
                    "claimed_period": g.claimed_period,
                    "network": net_path,
                    "state": state_path,
                }),
                wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
        Command::Compile { circuit, normalize, output } => {
            let start = Instant::now();
            let text = std::fs::read_to_string(&circuit)
                .with_context(|| format!("reading {}", circuit.display()))?;
            let parsed = parse_circuit(&text)?;
            let alt: AlternatingCircuit = if normalize {
                normalize_alternating(&parsed)
            } else {
                AlternatingCircuit::try_from_circuit(parsed)
                    .map_err(|v| anyhow::anyhow!("circuit is not alternating: {v} (use --normalize)"))?
            };
            let cc = compile(&alt)?;
            std::fs::write(&output, serde_json::to_string_pretty(&compiled_json(&cc))?)
                .with_context(|| format!("writing {}", output.display()))?;
            let report = RunReport {
                command: echo,
                inputs: input_digests(&[&circuit])?,
                report: json!({
                    "nodes": cc.net.len(),
                    "p": cc.p,
                    "stages": cc.stages,
                    "inputs": cc.input_blocks.len(),
                    "output": output.display().to_string(),
                }),
                wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
        Command::VerifySim { compiled, exhaustive, samples, t, jobs } => {
            let start = Instant::now();
            let text = std::fs::read_to_string(&compiled)
                .with_context(|| format!("reading {}", compiled.display()))?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", compiled.display()))?;
            let cc = compiled_from_json(&v)?;
            let n = cc.input_blocks.len();
            let sampled = if exhaustive { None } else { samples };
            let xs: Vec<Vec<bool>> = if let Some(k) = sampled {
                let mut seed = 0x2545f4914f6cdd1du64;
                (0..k)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                seed = seed
                                    .wrapping_mul(6364136223846793005)
                                    .wrapping_add(1442695040888963407);
                                seed >> 33 & 1 == 1
                            })
                            .collect()
                    })
                    .collect()
            } else {
                if n > 12 {
                    bail!("{n} inputs is too many for --exhaustive; use --samples");
                }
                (0..1u64 << n)
                    .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect())
                    .collect()
            };
            // per input vector: number of good iterations, or the first
            // failure record; workers take interleaved slices and the
            // earliest failing (x, t) in enumeration order wins
            let jobs = jobs.max(1).min(xs.len().max(1));
            let check_one = |x: &Vec<bool>| -> (u64, Option<serde_json::Value>) {
                for ti in 0..=t {
                    let want = cc.circuit.iterate(x, ti);
                    match simulate_iterations(&cc, x, ti) {
                        Ok(got) if got == want => {}
                        Ok(got) => {
                            return (
                                ti as u64 + 1,
                                Some(json!({"x": x, "t": ti, "got": got, "want": want})),
                            )
                        }
                        Err(e) => {
                            return (
                                ti as u64 + 1,
                                Some(json!({
                                    "x": x, "t": ti, "ill_formed_block": e.block,
                                    "observed": e.observed, "want": want,
                                })),
                            )
                        }
                    }
                }
                (t as u64 + 1, None)
            };
            let results: Vec<(usize, u64, Option<serde_json::Value>)> =
                std::thread::scope(|scope| {
                    let handles: Vec<_> = (0..jobs)
                        .map(|w| {
                            let xs = &xs;
                            let check_one = &check_one;
                            scope.spawn(move || {
                                let mut local = Vec::new();
                                let mut idx = w;
                                while idx < xs.len() {
                                    let (c, f) = check_one(&xs[idx]);
                                    let stop = f.is_some();
                                    local.push((idx, c, f));
                                    if stop {
                                        break;
                                    }
                                    idx += jobs;
                                }
                                local
                            })
                        })
                        .collect();
                    handles.into_iter().flat_map(|h| h.join().expect("verify worker")).collect()
                });
            let first_fail = results
                .iter()
                .filter(|(_, _, f)| f.is_some())
                .min_by_key(|(i, _, _)| *i);
            let checked: u64 = match first_fail {
                // counts up to and including the failing vector, in order
                Some(&(stop, _, _)) => results
                    .iter()
                    .filter(|(i, _, _)| *i <= stop)
                    .map(|(_, c, _)| c)
                    .sum(),
                None => results.iter().map(|(_, c, _)| c).sum(),
            };
            let failure = first_fail.and_then(|(_, _, f)| f.clone());
            let report = RunReport {
                command: echo,
                inputs: input_digests(&[&compiled])?,
                report: json!({
                    "ok": failure.is_none(),
                    "checked": checked,
                    "first_failure": failure,
                    "p": cc.p,
                }),
                wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
    }
    Ok(())
}

fn input_digests(paths: &[&Path]) -> Result<BTreeMap<String, String>> {
    paths
        .iter()
        .map(|p| Ok((p.display().to_string(), file_digest(p)?)))
        .collect()
}

/// Entry point shared by the binary: parse, run, map errors to exit 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own help/version through the error
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

/// Helper for the verifier examples: the claimed-vs-measured record of a
/// gadget, as JSON.
pub fn verify_report(g: &GadgetInstance) -> Result<serde_json::Value> {
    let v = verify_claimed_period(g, budget())?;
    Ok(json!({
        "ok": v.ok,
        "measured": v.measured,
        "transient": v.transient,
        "claimed": match g.claimed_period {
            ClaimedPeriod::Exactly(p) => json!(p),
            ClaimedPeriod::NonPolynomial => json!("nonpolynomial"),
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_to_string(args: &[&str]) -> (String, Result<()>) {
        let cli = Cli::try_parse_from(args).expect("args parse");
        let mut buf = Vec::new();
        let r = run(cli, &mut buf);
        (String::from_utf8(buf).unwrap(), r)
    }

    #[test]
    fn step_traces_fig1a() {
        let dir = std::env::temp_dir().join("firemem_cli_step");
        std::fs::create_dir_all(&dir).unwrap();
        let g = build_clock_network(2).unwrap();
        let net_path = dir.join("net.json");
        let st_path = dir.join("st.json");
        std::fs::write(&net_path, serde_json::to_string(&g.network_json()).unwrap()).unwrap();
        std::fs::write(&st_path, serde_json::to_string(&g.state_json()).unwrap()).unwrap();
        let (out, r) = run_to_string(&[
            "firemem",
            "step",
            net_path.to_str().unwrap(),
            st_path.to_str().unwrap(),
            "--steps",
            "3",
        ]);
        r.unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], r#"{"delta":[0,1,2]}"#);
        assert_eq!(lines[1], r#"{"delta":[2,0,1]}"#);
        assert_eq!(lines[2], r#"{"delta":[1,2,0]}"#);
        assert_eq!(lines[3], r#"{"delta":[0,1,2]}"#);
    }

    #[test]
    fn predict_and_attractor_reports() {
        let dir = std::env::temp_dir().join("firemem_cli_reports");
        std::fs::create_dir_all(&dir).unwrap();
        let g = build_clock_network(3).unwrap();
        let net_path = dir.join("net.json");
        let st_path = dir.join("st.json");
        std::fs::write(&net_path, serde_json::to_string(&g.network_json()).unwrap()).unwrap();
        std::fs::write(&st_path, serde_json::to_string(&g.state_json()).unwrap()).unwrap();

        let (out, r) = run_to_string(&[
            "firemem",
            "attractor",
            net_path.to_str().unwrap(),
            st_path.to_str().unwrap(),
        ]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["report"]["period"], 4);
        assert_eq!(v["report"]["transient"], 0);

        let (out, r) = run_to_string(&[
            "firemem",
            "predict",
            net_path.to_str().unwrap(),
            st_path.to_str().unwrap(),
            "--node",
            "0",
        ]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["report"]["answer"], true);
        assert_eq!(v["report"]["witness_time"], 1);
    }

    #[test]
    fn census_emits_spec_rows() {
        let dir = std::env::temp_dir().join("firemem_cli_census");
        std::fs::create_dir_all(&dir).unwrap();
        let g = build_clock_network(2).unwrap();
        let net_path = dir.join("net.json");
        std::fs::write(&net_path, serde_json::to_string(&g.network_json()).unwrap()).unwrap();
        let (out, r) = run_to_string(&["firemem", "census", net_path.to_str().unwrap()]);
        r.unwrap();
        let rows: Vec<serde_json::Value> = serde_json::from_str(&out).unwrap();
        let total: u64 = rows.iter().map(|r| r["basin"].as_u64().unwrap()).sum();
        assert_eq!(total, 27);
        assert!(rows[0].get("period").is_some());
        assert!(rows[0].get("representative").is_some());
    }

    #[test]
    fn malformed_json_is_an_error() {
        let dir = std::env::temp_dir().join("firemem_cli_bad");
        std::fs::create_dir_all(&dir).unwrap();
        let bad = dir.join("bad.json");
        std::fs::write(&bad, "{\"n\": 1,").unwrap();
        let cli = Cli::try_parse_from(["firemem", "census", bad.to_str().unwrap()]).unwrap();
        let mut buf = Vec::new();
        let err = run(cli, &mut buf).unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("parsing"), "{msg}");
    }
}
