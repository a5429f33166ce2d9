#![allow(dead_code)]

use std::collections::HashMap;

use chronode_core::{build_network, EngineState, EventKind, NodeId, ScenarioSpec, SubstrateEvent, TieBreak, Trace};

pub const MAX_STEPS: u64 = 1_000_000;

pub fn engine(spec: &ScenarioSpec, seed: u64) -> EngineState {
    build_network(spec, seed).expect("scenario builds")
}

pub fn run(spec: &ScenarioSpec, seed: u64) -> Trace {
    engine(spec, seed).run_until_quiescent(spec.budget.unwrap_or(MAX_STEPS)).expect("run succeeds")
}

pub fn run_alternate(spec: &ScenarioSpec, seed: u64) -> Trace {
    let mut e = engine(spec, seed);
    e.set_tiebreak(TieBreak::Alternate);
    e.run_until_quiescent(spec.budget.unwrap_or(MAX_STEPS)).expect("run succeeds")
}

/// Causal edges read straight off the log: per-node succession in log
/// order, and each emission to every delivery of the same signal.
pub fn causal_edges(log: &[SubstrateEvent]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for (j, b) in log.iter().enumerate() {
        if let Some(i) = (0..j).rev().find(|&i| log[i].node == b.node) {
            edges.push((i, j));
        }
        if matches!(b.kind, EventKind::Arrive | EventKind::ClockArrive) {
            for (i, a) in log[..j].iter().enumerate() {
                if matches!(a.kind, EventKind::Decay | EventKind::Tick) && a.signal.is_some() && a.signal == b.signal {
                    edges.push((i, j));
                }
            }
        }
    }
    edges
}

/// Every event that reaches `target` through the edge set, by reverse
/// depth-first search.
pub fn ancestors_of(n: usize, edges: &[(usize, usize)], target: usize) -> Vec<bool> {
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        preds[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = preds[target].clone();
    while let Some(i) = stack.pop() {
        if !seen[i] {
            seen[i] = true;
            stack.extend(&preds[i]);
        }
    }
    seen
}

/// Full reachability matrix by Floyd–Warshall.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in edges {
        reach[a][b] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (cell, &next) in row.iter_mut().zip(&via) {
                    *cell |= next;
                }
            }
        }
    }
    reach
}

/// Log index of the label event for `detector` at `addr`.
pub fn label_index(log: &[SubstrateEvent], detector: &NodeId, addr: u64) -> Option<usize> {
    log.iter()
        .position(|e| e.kind == EventKind::Label && &e.node == detector && e.addr == Some(addr))
}

/// Checks each detector timeline against a closure computed from scratch.
/// Returns the first inverted pair as `(detector, earlier addr, later addr)`.
pub fn brute_force_inversion(trace: &Trace) -> Option<(NodeId, u64, u64)> {
    let log = &trace.events;
    let edges = causal_edges(log);
    let mut cache: HashMap<usize, Vec<bool>> = HashMap::new();
    for (det, timeline) in &trace.timelines {
        let idx: Vec<usize> = timeline
            .iter()
            .map(|t| label_index(log, det, t.addr).expect("every label is logged"))
            .collect();
        for i in 0..idx.len() {
            for j in i + 1..idx.len() {
                let anc = cache.entry(idx[i]).or_insert_with(|| ancestors_of(log.len(), &edges, idx[i]));
                if anc[idx[j]] {
                    return Some((det.clone(), timeline[j].addr, timeline[i].addr));
                }
            }
        }
    }
    None
}
