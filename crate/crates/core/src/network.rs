//! Causal substrate and the deterministic event engine.
//!
//! The engine orders pending events on a hidden rational coordinate. That
//! coordinate, together with the step counter, exists only to schedule work:
//! it is written to the opt-in `EVENT` diagnostic section and nowhere else.
//! Everything observable (labels, deltas, arrows, timelines) is computed from
//! tick labels.
//!
//! Events at the same coordinate are ordered by kind first, so that a signal
//! arriving exactly when a tick arrives is held before the tick is processed
//! (the tick then labels it). Within a kind the order is
//! `(node, origin node, emission index)`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fmt;

use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::ids::NodeId;
use crate::infostate::{Qubit, Qword};
use crate::rational::{format_rational, Rational, Seconds};
use crate::scenario::{NodeDecl, ScenarioSpec};
use crate::tcomputer::{self, MemoryRecord, PipelineError};
use crate::trace::{Termination, Trace, TraceHeader};

/// Default link speed, m/s.
pub const SPEED_OF_LIGHT: i64 = 299_792_458;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LifetimeModel {
    Deterministic(Seconds),
    Exponential(Seconds),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Excited,
    Ground,
}

/// Whether a Feynman clock that has already decayed can be excited again by
/// an incoming signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RearmPolicy {
    #[default]
    None,
    OnArrival,
}

impl fmt::Display for RearmPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RearmPolicy::None => "none",
            RearmPolicy::OnArrival => "on-arrival",
        })
    }
}

/// Unstable source node.
#[derive(Debug, Clone, PartialEq)]
pub struct FcNode {
    pub id: NodeId,
    pub lifetime_model: LifetimeModel,
    pub decay_energy: Rational,
    /// Slots of the outgoing payload; stamped with `(id, emission)` on decay.
    pub emission_template: Vec<Qubit>,
    pub phase: Phase,
    /// Number of decays so far; also the next emission index.
    pub emissions: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardClock {
    pub id: NodeId,
    pub period: Seconds,
    pub next_tick: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorNode {
    pub id: NodeId,
    pub hold_buffer: VecDeque<Infostate>,
    pub memory_bank: Vec<MemoryRecord>,
    pub sc_source: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Fc(FcNode),
    Sc(StandardClock),
    Detector(DetectorNode),
}

impl Node {
    pub fn id(&self) -> &NodeId {
        match self {
            Node::Fc(n) => &n.id,
            Node::Sc(n) => &n.id,
            Node::Detector(n) => &n.id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub src: NodeId,
    pub dst: NodeId,
    pub length: Rational,
    pub speed: Rational,
}

impl Link {
    pub fn transit(&self) -> Seconds {
        Seconds(&self.length / &self.speed)
    }
}

/// A signal in flight or held by a detector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infostate {
    pub payload: Qword,
    pub origin: NodeId,
    pub emission_index: u64,
    pub hops: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("link {src} -> {dst} references an unknown node")]
    DanglingLink { src: NodeId, dst: NodeId },
    #[error("detector `{0}` has no standard clock")]
    DetectorWithoutClock(NodeId),
    #[error("scenario declares no standard clock")]
    NoStandardClock,
    #[error("link {src} -> {dst} is not allowed: {reason}")]
    InvalidLink { src: NodeId, dst: NodeId, reason: &'static str },
    #[error("excitation targets `{0}`, which is not a feynman clock")]
    InvalidExcitation(NodeId),
    #[error("node `{node}`: {what}")]
    InvalidParameter { node: NodeId, what: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("no pending events")]
    QueueEmpty,
    #[error("step budget must be positive")]
    InvalidBudget,
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Substrate-ordering policy. `Alternate` reverses the order of same-kind
/// events at different nodes sharing a coordinate; it exists so tests can
/// show derived output does not depend on that choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Primary,
    Alternate,
}

/// Kinds of substrate event, in the order they are processed at equal
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Excite,
    Decay,
    Arrive,
    Tick,
    ClockArrive,
    /// Not scheduled; logged once per memory record written by a tick.
    Label,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Excite => "excite",
            EventKind::Decay => "decay",
            EventKind::Arrive => "arrive",
            EventKind::Tick => "tick",
            EventKind::ClockArrive => "clock",
            EventKind::Label => "label",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        [
            EventKind::Excite,
            EventKind::Decay,
            EventKind::Arrive,
            EventKind::Tick,
            EventKind::ClockArrive,
            EventKind::Label,
        ]
        .into_iter()
        .find(|k| k.as_str() == text)
    }
}

/// One entry of the substrate log. `signal` names the emission a delivery
/// carries, or the emission a decay/tick produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstrateEvent {
    pub step: u64,
    pub coord: Seconds,
    pub kind: EventKind,
    pub node: NodeId,
    pub signal: Option<(NodeId, u64)>,
    pub addr: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceRecord {
    Event(SubstrateEvent),
    Label(MemoryRecord),
}

#[derive(Debug, Clone, PartialEq)]
enum Payload {
    Excite,
    Decay,
    Arrive(Infostate),
    Tick,
    ClockArrive(Infostate),
}

#[derive(Debug, Clone, PartialEq)]
struct Pending {
    coord: Seconds,
    kind: EventKind,
    exec_rank: usize,
    origin_rank: usize,
    emission: u64,
    seq: u64,
    node: NodeId,
    payload: Payload,
}

impl Pending {
    fn key(&self) -> (&Seconds, EventKind, usize, usize, u64, u64) {
        (&self.coord, self.kind, self.exec_rank, self.origin_rank, self.emission, self.seq)
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Lifetime draw. Deterministic models return their value; exponential
/// models return `-mean * ln(u)` with `u` a 53-bit uniform in `(0, 1]`.
pub fn sample_lifetime(model: &LifetimeModel, rng: &mut ChaCha8Rng) -> Seconds {
    match model {
        LifetimeModel::Deterministic(d) => d.clone(),
        LifetimeModel::Exponential(mean) => {
            let u = ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64;
            exponential_from_uniform(mean, u)
        }
    }
}

/// `-mean * ln(u)`; the logarithm is evaluated in binary64 with a portable
/// libm and the result converted to a rational without rounding.
pub fn exponential_from_uniform(mean: &Seconds, u: f64) -> Seconds {
    let x = -libm::log(u);
    if x <= 0.0 {
        return Seconds::zero();
    }
    let exact = Rational::from_float(x).expect("finite logarithm");
    mean * &exact
}

/// The per-node generator. All streams share the run seed; each node draws
/// from its own ChaCha8 stream so draws follow that node's causal history.
pub fn node_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mutable state of one simulation run.
#[derive(Debug, Clone)]
pub struct EngineState {
    nodes: BTreeMap<NodeId, Node>,
    links: Vec<Link>,
    pending: BinaryHeap<Reverse<Pending>>,
    step_index: u64,
    rngs: BTreeMap<NodeId, ChaCha8Rng>,
    inactive_set: BTreeSet<NodeId>,
    rearm: RearmPolicy,
    tiebreak: TieBreak,
    ranks: BTreeMap<NodeId, usize>,
    next_seq: u64,
    seed: u64,
    digest: String,
    log: Vec<TraceRecord>,
}

/// Validates a scenario and seeds the queue with clock tick 0 for every
/// standard clock and every declared excitation.
pub fn build_network(spec: &ScenarioSpec, seed: u64) -> Result<EngineState, BuildError> {
    let mut nodes = BTreeMap::new();
    for decl in &spec.nodes {
        let node = match decl {
            NodeDecl::Fc(fc) => {
                let lifetime_ok = match &fc.lifetime {
                    LifetimeModel::Deterministic(d) | LifetimeModel::Exponential(d) => d.is_positive(),
                };
                if !lifetime_ok {
                    return Err(BuildError::InvalidParameter { node: fc.id.clone(), what: "lifetime must be positive" });
                }
                if fc.energy_ev < Rational::zero() {
                    return Err(BuildError::InvalidParameter { node: fc.id.clone(), what: "decay energy is negative" });
                }
                if fc.emit.is_empty() || fc.emit.iter().any(|q| q.tick_value().is_some()) {
                    return Err(BuildError::InvalidParameter {
                        node: fc.id.clone(),
                        what: "emission template must be nonempty and carry no tick label",
                    });
                }
                Node::Fc(FcNode {
                    id: fc.id.clone(),
                    lifetime_model: fc.lifetime.clone(),
                    decay_energy: fc.energy_ev.clone(),
                    emission_template: fc.emit.clone(),
                    phase: Phase::Ground,
                    emissions: 0,
                })
            }
            NodeDecl::Sc(sc) => {
                if !sc.period.is_positive() {
                    return Err(BuildError::InvalidParameter { node: sc.id.clone(), what: "period must be positive" });
                }
                Node::Sc(StandardClock { id: sc.id.clone(), period: sc.period.clone(), next_tick: 0 })
            }
            NodeDecl::Det(d) => Node::Detector(DetectorNode {
                id: d.id.clone(),
                hold_buffer: VecDeque::new(),
                memory_bank: Vec::new(),
                sc_source: d.clock.clone(),
            }),
        };
        nodes.insert(decl.id().clone(), node);
    }

    if !nodes.values().any(|n| matches!(n, Node::Sc(_))) {
        return Err(BuildError::NoStandardClock);
    }
    for n in nodes.values() {
        if let Node::Detector(d) = n {
            if !matches!(nodes.get(&d.sc_source), Some(Node::Sc(_))) {
                return Err(BuildError::DetectorWithoutClock(d.id.clone()));
            }
        }
    }

    let mut links = Vec::with_capacity(spec.links.len());
    for l in &spec.links {
        let (Some(src), Some(dst)) = (nodes.get(&l.src), nodes.get(&l.dst)) else {
            return Err(BuildError::DanglingLink { src: l.src.clone(), dst: l.dst.clone() });
        };
        let invalid = |reason| BuildError::InvalidLink { src: l.src.clone(), dst: l.dst.clone(), reason };
        match (src, dst) {
            (Node::Fc(_), Node::Fc(_) | Node::Detector(_)) => {}
            (Node::Sc(sc), Node::Detector(d)) if d.sc_source == sc.id => {}
            (Node::Sc(_), _) => return Err(invalid("a clock only links to detectors it drives")),
            _ => return Err(invalid("only feynman clocks and standard clocks emit signals")),
        }
        if links.iter().any(|x: &Link| x.src == l.src && x.dst == l.dst) {
            return Err(invalid("duplicate link"));
        }
        if l.length_m < Rational::zero() {
            return Err(invalid("negative length"));
        }
        let speed = l.speed.clone().unwrap_or_else(|| Rational::from_integer(SPEED_OF_LIGHT.into()));
        if speed <= Rational::zero() {
            return Err(invalid("speed must be positive"));
        }
        links.push(Link { src: l.src.clone(), dst: l.dst.clone(), length: l.length_m.clone(), speed });
    }

    let ranks: BTreeMap<NodeId, usize> = nodes.keys().cloned().enumerate().map(|(i, id)| (id, i)).collect();
    let rngs = ranks
        .iter()
        .map(|(id, &rank)| (id.clone(), node_rng(seed, rank as u64)))
        .collect();

    let mut state = EngineState {
        nodes,
        links,
        pending: BinaryHeap::new(),
        step_index: 0,
        rngs,
        inactive_set: BTreeSet::new(),
        rearm: spec.rearm,
        tiebreak: TieBreak::Primary,
        ranks,
        next_seq: 0,
        seed,
        digest: spec.digest(),
        log: Vec::new(),
    };

    let clocks: Vec<NodeId> = state
        .nodes
        .values()
        .filter(|n| matches!(n, Node::Sc(_)))
        .map(|n| n.id().clone())
        .collect();
    for sc in clocks {
        state.schedule(Seconds::zero(), sc.clone(), sc, 0, Payload::Tick);
    }
    for e in &spec.excitations {
        if !matches!(state.nodes.get(&e.fc), Some(Node::Fc(_))) {
            return Err(BuildError::InvalidExcitation(e.fc.clone()));
        }
        if e.at.is_negative() {
            return Err(BuildError::InvalidParameter { node: e.fc.clone(), what: "excitation coordinate is negative" });
        }
        state.schedule(e.at.clone(), e.fc.clone(), e.fc.clone(), 0, Payload::Excite);
    }
    state.refresh_inactive();
    Ok(state)
}

impl EngineState {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, Node> {
        &self.nodes
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// Nodes with no pending work, no held signals and no excitation.
    pub fn inactive_set(&self) -> &BTreeSet<NodeId> {
        &self.inactive_set
    }

    pub fn set_tiebreak(&mut self, tiebreak: TieBreak) {
        self.tiebreak = tiebreak;
        let pending: Vec<Pending> = self.pending.drain().map(|Reverse(p)| p).collect();
        for mut p in pending {
            p.exec_rank = self.exec_rank(&p.node);
            self.pending.push(Reverse(p));
        }
    }

    /// Kinds of pending events in queue order, for inspection.
    pub fn pending_kinds(&self) -> Vec<(EventKind, NodeId)> {
        let mut all: Vec<&Pending> = self.pending.iter().map(|Reverse(p)| p).collect();
        all.sort();
        all.into_iter().map(|p| (p.kind, p.node.clone())).collect()
    }

    /// Every detector's memory bank.
    pub fn banks(&self) -> BTreeMap<NodeId, Vec<MemoryRecord>> {
        self.nodes
            .values()
            .filter_map(|n| match n {
                Node::Detector(d) => Some((d.id.clone(), d.memory_bank.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn clock_periods(&self) -> Vec<(NodeId, Seconds)> {
        self.nodes
            .values()
            .filter_map(|n| match n {
                Node::Sc(sc) => Some((sc.id.clone(), sc.period.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn header(&self) -> TraceHeader {
        TraceHeader {
            version: env!("CARGO_PKG_VERSION").to_string(),
            digest: self.digest.clone(),
            seed: self.seed,
            clocks: self.clock_periods(),
        }
    }

    fn exec_rank(&self, node: &NodeId) -> usize {
        let r = self.ranks[node];
        match self.tiebreak {
            TieBreak::Primary => r,
            TieBreak::Alternate => self.ranks.len() - 1 - r,
        }
    }

    fn schedule(&mut self, coord: Seconds, node: NodeId, origin: NodeId, emission: u64, payload: Payload) {
        let kind = match &payload {
            Payload::Excite => EventKind::Excite,
            Payload::Decay => EventKind::Decay,
            Payload::Arrive(_) => EventKind::Arrive,
            Payload::Tick => EventKind::Tick,
            Payload::ClockArrive(_) => EventKind::ClockArrive,
        };
        let seq = self.next_seq;
        self.next_seq += 1;
        self.pending.push(Reverse(Pending {
            coord,
            kind,
            exec_rank: self.exec_rank(&node),
            origin_rank: self.ranks[&origin],
            emission,
            seq,
            node,
            payload,
        }));
    }

    /// Quiescent: only standard-clock ticks remain and no detector holds an
    /// unlabeled signal.
    pub fn is_quiescent(&self) -> bool {
        let only_ticks = self
            .pending
            .iter()
            .all(|Reverse(p)| matches!(p.kind, EventKind::Tick | EventKind::ClockArrive));
        let nothing_held = self.nodes.values().all(|n| match n {
            Node::Detector(d) => d.hold_buffer.is_empty(),
            _ => true,
        });
        only_ticks && nothing_held
    }

    fn refresh_inactive(&mut self) {
        let busy: BTreeSet<&NodeId> = self.pending.iter().map(|Reverse(p)| &p.node).collect();
        self.inactive_set = self
            .nodes
            .values()
            .filter(|n| {
                !busy.contains(n.id())
                    && match n {
                        Node::Fc(fc) => fc.phase == Phase::Ground,
                        Node::Detector(d) => d.hold_buffer.is_empty(),
                        Node::Sc(_) => true,
                    }
            })
            .map(|n| n.id().clone())
            .collect();
    }

    fn rng_for(&mut self, node: &NodeId) -> &mut ChaCha8Rng {
        self.rngs.get_mut(node).expect("every node has a stream")
    }

    fn excite(&mut self, coord: &Seconds, id: &NodeId) {
        let Some(Node::Fc(fc)) = self.nodes.get_mut(id) else { return };
        fc.phase = Phase::Excited;
        let model = fc.lifetime_model.clone();
        let emission = fc.emissions;
        let lifetime = sample_lifetime(&model, self.rng_for(id));
        self.schedule(coord + &lifetime, id.clone(), id.clone(), emission, Payload::Decay);
    }

    /// Processes the earliest pending event and returns what it produced.
    pub fn step(&mut self) -> Result<Vec<TraceRecord>, EngineError> {
        let Reverse(ev) = self.pending.pop().ok_or(EngineError::QueueEmpty)?;
        self.step_index += 1;
        let step = self.step_index;
        let mut out = Vec::new();
        let log = |kind, node: &NodeId, signal: Option<(NodeId, u64)>, addr| {
            TraceRecord::Event(SubstrateEvent {
                step,
                coord: ev.coord.clone(),
                kind,
                node: node.clone(),
                signal,
                addr,
            })
        };

        match ev.payload.clone() {
            Payload::Excite => {
                out.push(log(EventKind::Excite, &ev.node, None, None));
                let ground = matches!(self.nodes.get(&ev.node), Some(Node::Fc(fc)) if fc.phase == Phase::Ground);
                if ground {
                    self.excite(&ev.coord, &ev.node);
                }
            }
            Payload::Decay => {
                let Some(Node::Fc(fc)) = self.nodes.get_mut(&ev.node) else {
                    unreachable!("decay scheduled on a non-FC node")
                };
                let signal = tcomputer::decay_fc(fc)?;
                out.push(log(
                    EventKind::Decay,
                    &ev.node,
                    Some((ev.node.clone(), signal.emission_index)),
                    None,
                ));
                let outgoing: Vec<Link> = self.links.iter().filter(|l| l.src == ev.node).cloned().collect();
                for link in outgoing {
                    let mut s = signal.clone();
                    s.hops += 1;
                    let at = &ev.coord + &link.transit();
                    self.schedule(at, link.dst.clone(), ev.node.clone(), s.emission_index, Payload::Arrive(s));
                }
            }
            Payload::Arrive(s) => {
                out.push(log(EventKind::Arrive, &ev.node, Some((s.origin.clone(), s.emission_index)), None));
                let rearm = self.rearm;
                match self.nodes.get_mut(&ev.node) {
                    Some(Node::Detector(d)) => tcomputer::detect(d, s)?,
                    Some(Node::Fc(fc)) => {
                        let can_fire = fc.phase == Phase::Ground
                            && (fc.emissions == 0 || rearm == RearmPolicy::OnArrival);
                        if can_fire {
                            self.excite(&ev.coord, &ev.node);
                        }
                    }
                    _ => unreachable!("links only deliver to FCs and detectors"),
                }
            }
            Payload::Tick => {
                let Some(Node::Sc(sc)) = self.nodes.get_mut(&ev.node) else {
                    unreachable!("tick scheduled on a non-clock node")
                };
                let signal = tcomputer::tick_sc(sc);
                let next = &ev.coord + &sc.period;
                let next_index = sc.next_tick;
                out.push(log(
                    EventKind::Tick,
                    &ev.node,
                    Some((ev.node.clone(), signal.emission_index)),
                    None,
                ));
                self.schedule(next, ev.node.clone(), ev.node.clone(), next_index, Payload::Tick);
                let driven: Vec<NodeId> = self
                    .nodes
                    .values()
                    .filter_map(|n| match n {
                        Node::Detector(d) if d.sc_source == ev.node => Some(d.id.clone()),
                        _ => None,
                    })
                    .collect();
                for det in driven {
                    let transit = self
                        .links
                        .iter()
                        .find(|l| l.src == ev.node && l.dst == det)
                        .map(Link::transit)
                        .unwrap_or_default();
                    let mut s = signal.clone();
                    s.hops += 1;
                    self.schedule(&ev.coord + &transit, det, ev.node.clone(), s.emission_index, Payload::ClockArrive(s));
                }
            }
            Payload::ClockArrive(s) => {
                out.push(log(EventKind::ClockArrive, &ev.node, Some((s.origin.clone(), s.emission_index)), None));
                let Some(Node::Detector(d)) = self.nodes.get_mut(&ev.node) else {
                    unreachable!("clock signal delivered to a non-detector")
                };
                for rec in tcomputer::pair_on_tick(d, &s)? {
                    out.push(log(EventKind::Label, &ev.node, None, Some(rec.addr)));
                    out.push(TraceRecord::Label(rec));
                }
            }
        }
        self.refresh_inactive();
        self.log.extend(out.iter().cloned());
        Ok(out)
    }

    /// Steps until quiescent or until `max_steps` events have been processed
    /// by this call, then assembles the trace.
    pub fn run_until_quiescent(&mut self, max_steps: u64) -> Result<Trace, EngineError> {
        if max_steps == 0 {
            return Err(EngineError::InvalidBudget);
        }
        let mut taken = 0;
        let termination = loop {
            if taken >= max_steps {
                break Termination::BudgetExhausted;
            }
            self.step()?;
            taken += 1;
            if self.is_quiescent() {
                break Termination::Quiescent;
            }
        };
        Ok(Trace::assemble(self.header(), &self.log, termination, self.step_index))
    }

    /// Everything [`step`](Self::step) has produced so far.
    pub fn records(&self) -> &[TraceRecord] {
        &self.log
    }
}

impl fmt::Display for SubstrateEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (origin, emission) = match &self.signal {
            Some((o, e)) => (o.to_string(), e.to_string()),
            None => ("-".into(), "-".into()),
        };
        let addr = self.addr.map_or_else(|| "-".to_string(), |a| a.to_string());
        write!(
            f,
            "{} {} {} {} {} {} {}",
            self.step,
            format_rational(self.coord.as_rational()),
            self.kind.as_str(),
            self.node,
            origin,
            emission,
            addr
        )
    }
}
