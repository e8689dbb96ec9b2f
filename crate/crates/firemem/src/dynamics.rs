//! Trajectories, attractor detection, the AND-prediction decision
//! procedure and an exhaustive census of the whole state space.

use std::collections::HashMap;
use std::collections::hash_map::Entry;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::net::{FmNetwork, FmState, NodeId, PackedState};

/// Default cap on enumerated/visited states, overridable via the
/// `FIREMEM_BUDGET` environment variable in the CLI.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynError {
    #[error("budget exceeded: no repeat within {0} steps/states")]
    BudgetExceeded(u64),
}

/// An eventually periodic orbit: `states` holds the transient prefix
/// followed by one full period, so `step(states.last())` equals
/// `states[transient]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub states: Vec<FmState>,
    pub transient: usize,
    pub period: usize,
}

impl Trajectory {
    /// The periodic suffix as an attractor.
    pub fn attractor(&self) -> Attractor {
        Attractor {
            cycle: self.states[self.transient..].to_vec(),
            period: self.period,
        }
    }
}

/// A limit cycle; `period == 1` is a fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attractor {
    pub cycle: Vec<FmState>,
    pub period: usize,
}

/// An AND-prediction instance: does `node` ever leave its initial boolean
/// state along the trajectory of `initial`?
#[derive(Debug, Clone)]
pub struct PredictionQuery<'a> {
    pub net: &'a FmNetwork,
    pub node: NodeId,
    pub initial: FmState,
}

/// Outcome of a prediction query. `witness_time` is the minimal `t >= 1`
/// with a flipped boolean state, when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub answer: bool,
    pub witness_time: Option<u64>,
}

/// Walk the trajectory from `s0` until the first revisit, recording every
/// state. Hash-map first-revisit detection gives the exact minimal
/// transient and period in one pass.
pub fn find_attractor(
    net: &FmNetwork,
    s0: &FmState,
    max_steps: u64,
) -> Result<Trajectory, DynError> {
    net.check_state(&s0.delta).expect("initial state valid for network");
    let mut seen: HashMap<PackedState, usize> = HashMap::new();
    let mut states: Vec<FmState> = Vec::new();
    let mut cur = s0.clone();
    for t in 0..=max_steps {
        match seen.entry(net.pack(&cur)) {
            Entry::Occupied(e) => {
                let first = *e.get();
                let period = t as usize - first;
                states.truncate(t as usize);
                return Ok(Trajectory { states, transient: first, period });
            }
            Entry::Vacant(v) => {
                v.insert(t as usize);
            }
        }
        states.push(cur.clone());
        cur = net.step(&cur);
    }
    Err(DynError::BudgetExceeded(max_steps))
}

/// Minimal period from `s0`, with an adaptive step budget capped at
/// `max_budget`.
pub fn period_of(net: &FmNetwork, s0: &FmState, max_budget: u64) -> Result<usize, DynError> {
    let mut budget = 256u64.min(max_budget);
    loop {
        match find_attractor(net, s0, budget) {
            Ok(t) => return Ok(t.period),
            Err(_) if budget < max_budget => budget = (budget * 4).min(max_budget),
            Err(e) => return Err(e),
        }
    }
}

/// Decide AND-prediction by direct simulation: scan the trajectory for the
/// first `t >= 1` where the node's boolean state differs from its initial
/// one; a full traversal of transient + period without a flip is a
/// complete proof of "no".
pub fn predict(q: &PredictionQuery) -> Prediction {
    let net = q.net;
    assert!(q.node < net.len(), "query node out of range");
    let x0 = q.initial.delta[q.node] >= 1;
    let mut seen: HashMap<PackedState, usize> = HashMap::new();
    let mut cur = q.initial.clone();
    let mut t = 0u64;
    loop {
        if seen.insert(net.pack(&cur), t as usize).is_some() {
            return Prediction { answer: false, witness_time: None };
        }
        cur = net.step(&cur);
        t += 1;
        if (cur.delta[q.node] >= 1) != x0 {
            return Prediction { answer: true, witness_time: Some(t) };
        }
    }
}

/// One census row: an attractor (by canonical representative), its period
/// and its basin size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub period: usize,
    pub basin: u64,
    /// Delta vector of the cycle state with the lexicographically least
    /// packed key; attractors are sets of configurations, so rotations of
    /// the same cycle are one row.
    pub representative: Vec<u32>,
}

/// Exhaustively enumerate every canonical shorthand state, assign each to
/// its attractor and report basin sizes. Rows are sorted by (period,
/// representative). The basin sizes sum to `prod(dt_i + 1)`.
pub fn brute_force_census(net: &FmNetwork, budget: u64) -> Result<Vec<CensusEntry>, DynError> {
    let total = net
        .state_space_size()
        .filter(|&s| s <= budget as u128)
        .ok_or(DynError::BudgetExceeded(budget))? as u64;

    let n = net.len();
    // attractor id per visited state; usize::MAX = unvisited
    let mut color: HashMap<PackedState, u32> = HashMap::with_capacity(total as usize);
    let mut entries: Vec<CensusEntry> = Vec::new();

    let mut delta = vec![0u32; n];
    let mut bools = vec![false; n];
    let mut scratch = vec![0u32; n];
    let mut more = true;
    while more {
        let start = FmState::new(delta.clone());
        let start_key = net.pack(&start);
        if !color.contains_key(&start_key) {
            // Walk forward until known territory or a self-revisit.
            let mut path: Vec<(PackedState, FmState)> = Vec::new();
            let mut path_index: HashMap<PackedState, usize> = HashMap::new();
            let mut cur = start;
            let id;
            loop {
                let key = net.pack(&cur);
                if let Some(&c) = color.get(&key) {
                    id = c;
                    break;
                }
                if let Some(&at) = path_index.get(&key) {
                    // New attractor: the cycle is path[at..].
                    let cycle: Vec<FmState> =
                        path[at..].iter().map(|(_, s)| s.clone()).collect();
                    let rep = cycle
                        .iter()
                        .min_by_key(|s| net.pack(s))
                        .expect("cycle nonempty")
                        .delta
                        .clone();
                    id = entries.len() as u32;
                    entries.push(CensusEntry { period: cycle.len(), basin: 0, representative: rep });
                    break;
                }
                path_index.insert(key.clone(), path.len());
                path.push((key, cur.clone()));
                net.step_into(&cur.delta.clone(), &mut scratch, &mut bools);
                cur = FmState::new(scratch.clone());
            }
            for (key, _) in path {
                color.insert(key, id);
            }
        }
        // Mixed-radix increment over canonical deltas.
        more = false;
        for (v, &top) in delta.iter_mut().zip(net.dt()) {
            if *v < top {
                *v += 1;
                more = true;
                break;
            }
            *v = 0;
        }
    }

    for &id in color.values() {
        entries[id as usize].basin += 1;
    }
    entries.sort_by(|a, b| (a.period, &a.representative).cmp(&(b.period, &b.representative)));
    Ok(entries)
}

/// Census split across `jobs` workers. Workers enumerate interleaved
/// slices of the state space and resolve attractors independently;
/// merging sums basins per canonical attractor key.
pub fn brute_force_census_parallel(
    net: &FmNetwork,
    budget: u64,
    jobs: usize,
) -> Result<Vec<CensusEntry>, DynError> {
    if jobs <= 1 {
        return brute_force_census(net, budget);
    }
    let total = net
        .state_space_size()
        .filter(|&s| s <= budget as u128)
        .ok_or(DynError::BudgetExceeded(budget))? as u64;

    let chunks: Vec<(u64, u64)> = {
        let per = total.div_ceil(jobs as u64);
        (0..jobs as u64)
            .map(|w| (w * per, ((w + 1) * per).min(total)))
            .filter(|(a, b)| a < b)
            .collect()
    };

    let partials: Vec<HashMap<Vec<u32>, (usize, u64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|&(lo, hi)| {
                scope.spawn(move || {
                    // representative delta -> (period, basin count in this slice)
                    let mut acc: HashMap<Vec<u32>, (usize, u64)> = HashMap::new();
                    // local memo: state -> representative delta
                    let mut memo: HashMap<PackedState, usize> = HashMap::new();
                    let mut reps: Vec<Vec<u32>> = Vec::new();
                    for idx in lo..hi {
                        let start = nth_state(net, idx);
                        let rep_id = resolve_attractor(net, start, &mut memo, &mut reps);
                        let rep = &reps[rep_id];
                        let e = acc.entry(rep.clone()).or_insert((0, 0));
                        e.1 += 1;
                        if e.0 == 0 {
                            // period recorded on first touch
                            let t = find_attractor(net, &FmState::new(rep.clone()), total)
                                .expect("attractor state closes within state space");
                            e.0 = t.period;
                        }
                    }
                    acc
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("census worker")).collect()
    });

    let mut merged: HashMap<Vec<u32>, (usize, u64)> = HashMap::new();
    for part in partials {
        for (rep, (period, basin)) in part {
            let e = merged.entry(rep).or_insert((period, 0));
            e.1 += basin;
        }
    }
    let mut entries: Vec<CensusEntry> = merged
        .into_iter()
        .map(|(representative, (period, basin))| CensusEntry { period, basin, representative })
        .collect();
    entries.sort_by(|a, b| (a.period, &a.representative).cmp(&(b.period, &b.representative)));
    Ok(entries)
}

/// The `idx`-th canonical state in mixed-radix order, node 0 least
/// significant.
fn nth_state(net: &FmNetwork, mut idx: u64) -> FmState {
    let mut d = vec![0u32; net.len()];
    for (i, v) in d.iter_mut().enumerate() {
        let base = net.dt()[i] as u64 + 1;
        *v = (idx % base) as u32;
        idx /= base;
    }
    FmState::new(d)
}

/// Walk from `start` to its attractor, memoizing every state on the way.
/// Returns an index into `reps` (canonical representative deltas).
fn resolve_attractor(
    net: &FmNetwork,
    start: FmState,
    memo: &mut HashMap<PackedState, usize>,
    reps: &mut Vec<Vec<u32>>,
) -> usize {
    let mut path: Vec<PackedState> = Vec::new();
    let mut path_index: HashMap<PackedState, usize> = HashMap::new();
    let mut states: Vec<FmState> = Vec::new();
    let mut cur = start;
    let id;
    loop {
        let key = net.pack(&cur);
        if let Some(&m) = memo.get(&key) {
            id = m;
            break;
        }
        if let Some(&at) = path_index.get(&key) {
            let rep = states[at..]
                .iter()
                .min_by_key(|s| net.pack(s))
                .expect("cycle nonempty")
                .delta
                .clone();
            id = reps.len();
            reps.push(rep);
            break;
        }
        path_index.insert(key.clone(), path.len());
        path.push(key);
        states.push(cur.clone());
        cur = net.step(&cur);
    }
    for key in path {
        memo.insert(key, id);
    }
    id
}
