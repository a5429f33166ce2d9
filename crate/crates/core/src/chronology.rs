//! Timelines and arrows of time built from memory banks, plus the
//! happens-before oracle they are checked against.
//!
//! The oracle never looks at tick labels. It is rebuilt from the substrate
//! log alone: an emission precedes every delivery of that signal, and each
//! event at a node precedes the next event processed at the same node.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::ids::NodeId;
use crate::infostate::{Qubit, Tag};
use crate::network::{EventKind, SubstrateEvent};
use crate::scenario::{NodeDecl, ScenarioSpec};
use crate::tcomputer::MemoryRecord;
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChronologyError {
    #[error("timeline event {0} is not in the happens-before relation")]
    UnknownEvent(String),
}

/// One position on a detector's timeline.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimelineEntry {
    pub addr: u64,
    pub tick: u64,
    /// Another record on this timeline carries the same tick.
    pub simultaneous: bool,
}

/// Orders a bank by `(tick, addr)`.
pub fn build_timeline(bank: &[MemoryRecord]) -> Vec<TimelineEntry> {
    let mut per_tick: HashMap<u64, usize> = HashMap::new();
    for r in bank {
        *per_tick.entry(r.label.tick).or_default() += 1;
    }
    let mut out: Vec<TimelineEntry> = bank
        .iter()
        .map(|r| TimelineEntry {
            addr: r.addr,
            tick: r.label.tick,
            simultaneous: per_tick[&r.label.tick] > 1,
        })
        .collect();
    out.sort_by_key(|e| (e.tick, e.addr));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrowKind {
    Qat,
    Cat,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventRef {
    Fc(NodeId),
    Mem { detector: NodeId, addr: u64 },
}

impl fmt::Display for EventRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventRef::Fc(id) => write!(f, "fc:{id}"),
            EventRef::Mem { detector, addr } => write!(f, "mem:{detector}/{addr}"),
        }
    }
}

impl EventRef {
    pub fn parse(text: &str) -> Option<Self> {
        if let Some(id) = text.strip_prefix("fc:") {
            return NodeId::new(id).ok().map(EventRef::Fc);
        }
        let (det, addr) = text.strip_prefix("mem:")?.rsplit_once('/')?;
        Some(EventRef::Mem {
            detector: NodeId::new(det).ok()?,
            addr: addr.parse().ok()?,
        })
    }
}

/// A pointer from an earlier to a later event. Quantum arrows run from a
/// decaying clock to the record its signal produced; classical arrows run
/// between consecutive records with strictly increasing labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowOfTime {
    pub kind: ArrowKind,
    pub detector: NodeId,
    pub from: EventRef,
    pub to: EventRef,
}

impl fmt::Display for ArrowOfTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ArrowKind::Qat => "QAT",
            ArrowKind::Cat => "CAT",
        };
        write!(f, "{kind} {} -> {}", self.from, self.to)
    }
}

/// All arrows for a set of banks, QATs first, each group ordered by
/// detector then address.
pub fn build_arrows(banks: &BTreeMap<NodeId, Vec<MemoryRecord>>) -> Vec<ArrowOfTime> {
    let mut qats = Vec::new();
    let mut cats = Vec::new();
    for (det, bank) in banks {
        let mem = |addr| EventRef::Mem { detector: det.clone(), addr };
        for r in bank {
            qats.push(ArrowOfTime {
                kind: ArrowKind::Qat,
                detector: det.clone(),
                from: EventRef::Fc(r.origin.clone()),
                to: mem(r.addr),
            });
        }
        let timeline = build_timeline(bank);
        for w in timeline.windows(2) {
            if w[1].tick > w[0].tick {
                cats.push(ArrowOfTime {
                    kind: ArrowKind::Cat,
                    detector: det.clone(),
                    from: mem(w[0].addr),
                    to: mem(w[1].addr),
                });
            }
        }
    }
    qats.extend(cats);
    qats
}

/// True when the arrows, read as edges, contain no directed cycle.
pub fn arrows_acyclic(arrows: &[ArrowOfTime]) -> bool {
    let mut indegree: BTreeMap<&EventRef, usize> = BTreeMap::new();
    let mut succ: BTreeMap<&EventRef, Vec<&EventRef>> = BTreeMap::new();
    for a in arrows {
        indegree.entry(&a.from).or_default();
        *indegree.entry(&a.to).or_default() += 1;
        succ.entry(&a.from).or_default().push(&a.to);
    }
    let mut ready: VecDeque<&EventRef> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    let mut seen = 0;
    while let Some(n) = ready.pop_front() {
        seen += 1;
        for m in succ.get(n).into_iter().flatten() {
            let d = indegree.get_mut(m).expect("target registered");
            *d -= 1;
            if *d == 0 {
                ready.push_back(m);
            }
        }
    }
    seen == indegree.len()
}

/// QAT arrows as `(fc, memory record)` direction pairs.
pub fn qat_directions(arrows: &[ArrowOfTime]) -> BTreeSet<(EventRef, EventRef)> {
    arrows
        .iter()
        .filter(|a| a.kind == ArrowKind::Qat)
        .map(|a| (a.from.clone(), a.to.clone()))
        .collect()
}

/// The reversed process: every emission template has its incoming and
/// outgoing particle identities exchanged (`custom:in.*` <-> `custom:out.*`)
/// and its momenta and directions negated. The network is untouched; the
/// decaying clocks are still where information comes from.
pub fn mirror_process(spec: &ScenarioSpec) -> ScenarioSpec {
    let mut out = spec.clone();
    for node in &mut out.nodes {
        if let NodeDecl::Fc(fc) = node {
            fc.emit = fc.emit.iter().map(mirror_slot).collect();
        }
    }
    out
}

fn mirror_slot(q: &Qubit) -> Qubit {
    let mirrored = match q.tag() {
        Tag::Momentum | Tag::Direction => q.with_value(-q.value().clone()),
        Tag::Custom(name) => match swap_particle_side(name) {
            Some(swapped) => q.with_tag(Tag::Custom(swapped)),
            None => return q.clone(),
        },
        _ => return q.clone(),
    };
    mirrored.expect("mirroring keeps slots valid")
}

fn swap_particle_side(name: &str) -> Option<String> {
    if let Some(rest) = name.strip_prefix("in.") {
        Some(format!("out.{rest}"))
    } else {
        name.strip_prefix("out.").map(|rest| format!("in.{rest}"))
    }
}

/// Identity of an event in the causal order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HbEvent {
    pub kind: EventKind,
    pub node: NodeId,
    pub signal: Option<(NodeId, u64)>,
    pub addr: Option<u64>,
    /// Disambiguates repeated events of the same shape (e.g. absorbed
    /// arrivals of one signal); counts prior identical events.
    pub occurrence: u32,
}

impl HbEvent {
    pub fn label(detector: NodeId, addr: u64) -> Self {
        HbEvent { kind: EventKind::Label, node: detector, signal: None, addr: Some(addr), occurrence: 0 }
    }
}

impl fmt::Display for HbEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind.as_str(), self.node)?;
        if let Some((o, e)) = &self.signal {
            write!(f, "[{o}/{e}]")?;
        }
        if let Some(a) = self.addr {
            write!(f, "#{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet(vec![0; n.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }
    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
}

/// A strict partial order over events, stored as its transitive closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HappensBefore {
    events: Vec<HbEvent>,
    index: HashMap<HbEvent, usize>,
    /// `ancestors[b]` holds every `a` with `a ≺ b`.
    ancestors: Vec<BitSet>,
}

impl HappensBefore {
    /// Closure of an arbitrary edge set over `events`. Edges must be
    /// acyclic; a cycle would make the relation reflexive.
    pub fn from_edges(events: Vec<HbEvent>, edges: &[(usize, usize)]) -> Self {
        let n = events.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            preds[b].push(a);
        }
        // Topological order via Kahn on the reversed adjacency.
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(a, b) in edges {
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut ready: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        while let Some(i) = ready.pop_front() {
            order.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push_back(j);
                }
            }
        }
        assert_eq!(order.len(), n, "happens-before edges contain a cycle");
        let mut ancestors = vec![BitSet::new(n); n];
        for &b in &order {
            for &a in &preds[b] {
                let (pa, pb) = if a < b {
                    let (lo, hi) = ancestors.split_at_mut(b);
                    (&lo[a], &mut hi[0])
                } else {
                    let (lo, hi) = ancestors.split_at_mut(a);
                    (&hi[0], &mut lo[b])
                };
                pb.union_with(pa);
                pb.insert(a);
            }
        }
        let index = events.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        HappensBefore { events, index, ancestors }
    }

    /// Builds the relation from a substrate log in processing order.
    pub fn from_log(log: &[SubstrateEvent]) -> Self {
        let mut events = Vec::with_capacity(log.len());
        let mut edges = Vec::new();
        let mut last_at: HashMap<&NodeId, usize> = HashMap::new();
        let mut emitted: HashMap<(&NodeId, u64), usize> = HashMap::new();
        let mut occurrences: HashMap<HbEvent, u32> = HashMap::new();
        for (i, e) in log.iter().enumerate() {
            let mut ev = HbEvent {
                kind: e.kind,
                node: e.node.clone(),
                signal: e.signal.clone(),
                addr: e.addr,
                occurrence: 0,
            };
            let seen = occurrences.entry(ev.clone()).or_default();
            ev.occurrence = *seen;
            *seen += 1;
            events.push(ev);

            if let Some(prev) = last_at.insert(&e.node, i) {
                edges.push((prev, i));
            }
            match (e.kind, &e.signal) {
                (EventKind::Decay | EventKind::Tick, Some((o, idx))) => {
                    emitted.insert((o, *idx), i);
                }
                (EventKind::Arrive | EventKind::ClockArrive, Some((o, idx))) => {
                    if let Some(&src) = emitted.get(&(o, *idx)) {
                        edges.push((src, i));
                    }
                }
                _ => {}
            }
        }
        HappensBefore::from_edges(events, &edges)
    }

    pub fn events(&self) -> &[HbEvent] {
        &self.events
    }

    pub fn index_of(&self, e: &HbEvent) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// `a ≺ b` by index.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.ancestors[b].contains(a)
    }

    /// Every ordered pair in the closure.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.events.len();
        let mut out = Vec::new();
        for b in 0..n {
            for a in 0..n {
                if self.precedes(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// The oracle for a completed run.
pub fn happens_before(trace: &Trace) -> HappensBefore {
    HappensBefore::from_log(&trace.events)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// `earlier ≺ later` in the oracle, yet the timeline puts `later` first.
    Violated { earlier: u64, later: u64 },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Checks that no happens-before pair is inverted by a detector's timeline.
/// Reports the first inversion scanning positions left to right.
pub fn is_linear_extension(
    detector: &NodeId,
    timeline: &[TimelineEntry],
    hb: &HappensBefore,
) -> Result<Verdict, ChronologyError> {
    let ids = timeline
        .iter()
        .map(|t| {
            let ev = HbEvent::label(detector.clone(), t.addr);
            hb.index_of(&ev).ok_or_else(|| ChronologyError::UnknownEvent(ev.to_string()))
        })
        .collect::<Result<Vec<usize>, _>>()?;
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            if hb.precedes(ids[j], ids[i]) {
                return Ok(Verdict::Violated { earlier: timeline[j].addr, later: timeline[i].addr });
            }
        }
    }
    Ok(Verdict::Holds)
}
