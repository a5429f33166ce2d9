//! Run output: labeled events plus everything derived from them, with a
//! line-oriented text form and a JSON-lines form carrying the same records.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chronology::{build_arrows, build_timeline, ArrowKind, ArrowOfTime, EventRef, TimelineEntry};
use crate::ids::NodeId;
use crate::infostate::Qword;
use crate::network::{EventKind, SubstrateEvent, TraceRecord};
use crate::observer::{AttentionFrame, Regime};
use crate::rational::{format_rational, parse_rational, Seconds};
use crate::tcomputer::{fetch_pair, subtract_labels, time_operator, DeltaRecord, MemoryRecord, Orientation, PipelineError, TimeLabel};

pub const TRACE_MAGIC: &str = "chronode";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Quiescent,
    BudgetExhausted,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Quiescent => "quiescent",
            Termination::BudgetExhausted => "budget-exhausted",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "quiescent" => Some(Termination::Quiescent),
            "budget-exhausted" => Some(Termination::BudgetExhausted),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceHeader {
    pub version: String,
    /// Short digest of the canonical scenario text.
    pub digest: String,
    pub seed: u64,
    pub clocks: Vec<(NodeId, Seconds)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFooter {
    pub termination: Termination,
    pub steps: u64,
}

/// Elapsed time between consecutive records of one detector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaEntry {
    pub detector: NodeId,
    pub delta: DeltaRecord,
    pub seconds: Seconds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub header: TraceHeader,
    /// Substrate log; kept in memory always, written out only on request.
    pub events: Vec<SubstrateEvent>,
    /// Sorted by detector, then address.
    pub labels: Vec<MemoryRecord>,
    pub deltas: Vec<DeltaEntry>,
    pub arrows: Vec<ArrowOfTime>,
    pub timelines: Vec<(NodeId, Vec<TimelineEntry>)>,
    pub frames: Vec<AttentionFrame>,
    pub footer: TraceFooter,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("trace has no header line")]
    MissingHeader,
    #[error("trace has no END line")]
    MissingFooter,
    #[error("records of `{0}` must have addresses 0, 1, 2, ... in order")]
    AddressGap(NodeId),
    #[error("unknown detector `{0}`")]
    UnknownDetector(NodeId),
    #[error("no period recorded for clock `{0}`")]
    UnknownClock(NodeId),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Text,
    JsonLines,
}

impl Trace {
    /// Builds a trace from the engine log. Deltas, timelines and arrows are
    /// all derived from the labeled records.
    pub fn assemble(header: TraceHeader, log: &[TraceRecord], termination: Termination, steps: u64) -> Trace {
        let mut events = Vec::new();
        let mut labels = Vec::new();
        for rec in log {
            match rec {
                TraceRecord::Event(e) => events.push(e.clone()),
                TraceRecord::Label(m) => labels.push(m.clone()),
            }
        }
        labels.sort_by(|a, b| (&a.detector, a.addr).cmp(&(&b.detector, b.addr)));
        let mut trace = Trace {
            header,
            events,
            labels,
            deltas: Vec::new(),
            arrows: Vec::new(),
            timelines: Vec::new(),
            frames: Vec::new(),
            footer: TraceFooter { termination, steps },
        };
        trace.derive();
        trace
    }

    /// The same trace with deltas, timelines and arrows recomputed from its
    /// label records, discarding whatever those sections held before.
    pub fn rederived(mut self) -> Trace {
        self.derive();
        self
    }

    fn derive(&mut self) {
        let banks = self.banks();
        self.timelines = banks.iter().map(|(d, bank)| (d.clone(), build_timeline(bank))).collect();
        self.arrows = build_arrows(&banks);
        let this: &Trace = self;
        let deltas = banks
            .iter()
            .flat_map(|(d, bank)| {
                (1..bank.len() as u64).map(move |k| this.delta(d, k - 1, k).expect("addresses are in range"))
            })
            .collect();
        self.deltas = deltas;
    }

    /// Memory banks rebuilt from the label records.
    pub fn banks(&self) -> BTreeMap<NodeId, Vec<MemoryRecord>> {
        let mut banks: BTreeMap<NodeId, Vec<MemoryRecord>> = BTreeMap::new();
        for rec in &self.labels {
            banks.entry(rec.detector.clone()).or_default().push(rec.clone());
        }
        banks
    }

    pub fn period_of(&self, clock: &NodeId) -> Option<&Seconds> {
        self.header.clocks.iter().find(|(id, _)| id == clock).map(|(_, p)| p)
    }

    /// Label difference and elapsed seconds between two addresses of one
    /// detector's bank.
    pub fn delta(&self, detector: &NodeId, from: u64, to: u64) -> Result<DeltaEntry, TraceError> {
        let bank: Vec<MemoryRecord> = self.labels.iter().filter(|r| &r.detector == detector).cloned().collect();
        if bank.is_empty() {
            return Err(TraceError::UnknownDetector(detector.clone()));
        }
        let pair = fetch_pair(&bank, from, to)?;
        let delta = subtract_labels(&pair, from, to)?;
        let clock = &bank[0].label.sc_id;
        let period = self.period_of(clock).ok_or_else(|| TraceError::UnknownClock(clock.clone()))?;
        Ok(DeltaEntry {
            detector: detector.clone(),
            seconds: time_operator(&delta, period),
            delta,
        })
    }

    /// Label ticks recorded by one detector, in address order.
    pub fn label_ticks(&self, detector: &NodeId) -> Vec<u64> {
        self.labels.iter().filter(|r| &r.detector == detector).map(|r| r.label.tick).collect()
    }

    /// Text of the sections that depend only on what was labeled: everything
    /// but the header, substrate events and footer.
    pub fn derived_text(&self) -> String {
        let mut out = String::new();
        for line in self.lines(false).into_iter().filter(|l| {
            !(l.starts_with("TRACE ") || l.starts_with("CLOCK ") || l.starts_with("END "))
        }) {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    fn lines(&self, debug_substrate: bool) -> Vec<String> {
        let h = &self.header;
        let mut lines = vec![format!("TRACE {TRACE_MAGIC} {} {} {}", h.version, h.digest, h.seed)];
        lines.extend(h.clocks.iter().map(|(id, p)| format!("CLOCK {id} {p}")));
        if debug_substrate {
            lines.extend(self.events.iter().map(|e| format!("EVENT {e}")));
        }
        lines.extend(self.labels.iter().enumerate().map(|(seq, r)| {
            format!(
                "LABEL {seq} {} {} {} {} {} {} {}",
                r.addr,
                r.label.tick,
                r.detector,
                r.label.sc_id,
                r.origin,
                r.event.render_slots(),
                r.event.render_provenance()
            )
        }));
        lines.extend(self.deltas.iter().map(|d| {
            format!(
                "DELTA {} {} {} {} {} {} {}",
                d.detector,
                d.delta.from_addr,
                d.delta.to_addr,
                d.delta.signed_ticks,
                d.delta.magnitude_ticks,
                d.delta.orientation,
                d.seconds
            )
        }));
        lines.extend(self.arrows.iter().map(|a| format!("ARROW {a}")));
        for (det, timeline) in &self.timelines {
            for (pos, e) in timeline.iter().enumerate() {
                let sim = if e.simultaneous { "sim" } else { "-" };
                lines.push(format!("TIMELINE {det} {pos} {} {} {sim}", e.addr, e.tick));
            }
        }
        lines.extend(self.frames.iter().map(|f| f.to_string()));
        lines.push(format!("END {} {}", self.footer.termination.as_str(), self.footer.steps));
        lines
    }

    pub fn emit_text(&self, debug_substrate: bool) -> String {
        let mut out = String::new();
        for line in self.lines(debug_substrate) {
            let _ = writeln!(out, "{line}");
        }
        out
    }

    pub fn emit_json_lines(&self, debug_substrate: bool) -> String {
        let mut out = String::new();
        for wire in self.to_wire(debug_substrate) {
            out.push_str(&serde_json::to_string(&wire).expect("wire records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn emit(&self, format: TraceFormat, debug_substrate: bool) -> String {
        match format {
            TraceFormat::Text => self.emit_text(debug_substrate),
            TraceFormat::JsonLines => self.emit_json_lines(debug_substrate),
        }
    }

    /// Reads either format, choosing by the first non-blank character.
    pub fn parse(text: &str) -> Result<Trace, TraceError> {
        if text.trim_start().starts_with('{') {
            Trace::parse_json_lines(text)
        } else {
            Trace::parse_text(text)
        }
    }

    pub fn parse_text(text: &str) -> Result<Trace, TraceError> {
        let mut wires = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            wires.push(Wire::from_text(line).map_err(|message| TraceError::Malformed { line: i + 1, message })?);
        }
        Trace::from_wire(wires)
    }

    pub fn parse_json_lines(text: &str) -> Result<Trace, TraceError> {
        let mut wires = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            wires.push(serde_json::from_str(line).map_err(|e| TraceError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?);
        }
        Trace::from_wire(wires)
    }

    fn to_wire(&self, debug_substrate: bool) -> Vec<Wire> {
        let h = &self.header;
        let mut out = vec![Wire::Trace {
            magic: TRACE_MAGIC.into(),
            version: h.version.clone(),
            digest: h.digest.clone(),
            seed: h.seed,
        }];
        out.extend(h.clocks.iter().map(|(id, p)| Wire::Clock { sc: id.to_string(), period: p.to_string() }));
        if debug_substrate {
            out.extend(self.events.iter().map(|e| Wire::Event {
                step: e.step,
                coord: e.coord.to_string(),
                kind: e.kind.as_str().into(),
                node: e.node.to_string(),
                origin: e.signal.as_ref().map(|(o, _)| o.to_string()),
                emission: e.signal.as_ref().map(|(_, n)| *n),
                addr: e.addr,
            }));
        }
        out.extend(self.labels.iter().enumerate().map(|(seq, r)| Wire::Label {
            seq: seq as u64,
            detector: r.detector.to_string(),
            addr: r.addr,
            tick: r.label.tick,
            sc: r.label.sc_id.to_string(),
            origin: r.origin.to_string(),
            slots: r.event.render_slots(),
            provenance: r.event.render_provenance(),
        }));
        out.extend(self.deltas.iter().map(|d| Wire::Delta {
            detector: d.detector.to_string(),
            from: d.delta.from_addr,
            to: d.delta.to_addr,
            signed: d.delta.signed_ticks,
            magnitude: d.delta.magnitude_ticks,
            orientation: d.delta.orientation.to_string(),
            seconds: d.seconds.to_string(),
        }));
        out.extend(self.arrows.iter().map(|a| Wire::Arrow {
            kind: arrow_kind_str(a.kind).into(),
            from: a.from.to_string(),
            to: a.to.to_string(),
        }));
        for (det, timeline) in &self.timelines {
            out.extend(timeline.iter().enumerate().map(|(pos, e)| Wire::Timeline {
                detector: det.to_string(),
                position: pos as u64,
                addr: e.addr,
                tick: e.tick,
                simultaneous: e.simultaneous,
            }));
        }
        out.extend(self.frames.iter().map(|f| Wire::Frame {
            index: f.cycle_index,
            detected: f.detected,
            regime: f.regime.to_string(),
            rate: format_rational(&f.rate),
        }));
        out.push(Wire::End {
            reason: self.footer.termination.as_str().into(),
            steps: self.footer.steps,
        });
        out
    }

    fn from_wire(wires: Vec<Wire>) -> Result<Trace, TraceError> {
        let bad = |line: usize, message: String| TraceError::Malformed { line, message };
        let mut header = None;
        let mut clocks = Vec::new();
        let mut events = Vec::new();
        let mut labels = Vec::new();
        let mut deltas = Vec::new();
        let mut arrows = Vec::new();
        let mut timelines: Vec<(NodeId, Vec<TimelineEntry>)> = Vec::new();
        let mut frames = Vec::new();
        let mut footer = None;
        for (i, wire) in wires.into_iter().enumerate() {
            let line = i + 1;
            let id = |s: &str| NodeId::new(s).map_err(|e| bad(line, e.to_string()));
            let secs = |s: &str| Seconds::parse(s).map_err(|e| bad(line, e.to_string()));
            match wire {
                Wire::Trace { magic, version, digest, seed } => {
                    if magic != TRACE_MAGIC {
                        return Err(bad(line, format!("unexpected trace kind `{magic}`")));
                    }
                    header = Some((version, digest, seed));
                }
                Wire::Clock { sc, period } => clocks.push((id(&sc)?, secs(&period)?)),
                Wire::Event { step, coord, kind, node, origin, emission, addr } => {
                    let signal = match (origin, emission) {
                        (Some(o), Some(e)) => Some((id(&o)?, e)),
                        (None, None) => None,
                        _ => return Err(bad(line, "origin and emission must appear together".into())),
                    };
                    events.push(SubstrateEvent {
                        step,
                        coord: secs(&coord)?,
                        kind: EventKind::parse(&kind).ok_or_else(|| bad(line, format!("unknown event kind `{kind}`")))?,
                        node: id(&node)?,
                        signal,
                        addr,
                    });
                }
                Wire::Label { seq, detector, addr, tick, sc, origin, slots, provenance } => {
                    if seq != labels.len() as u64 {
                        return Err(bad(line, format!("label sequence {seq} out of order")));
                    }
                    labels.push(MemoryRecord {
                        detector: id(&detector)?,
                        addr,
                        label: TimeLabel { tick, sc_id: id(&sc)? },
                        event: Qword::parse(&slots, &provenance).map_err(|e| bad(line, e.to_string()))?,
                        origin: id(&origin)?,
                    });
                }
                Wire::Delta { detector, from, to, signed, magnitude, orientation, seconds } => {
                    deltas.push(DeltaEntry {
                        detector: id(&detector)?,
                        delta: DeltaRecord {
                            from_addr: from,
                            to_addr: to,
                            signed_ticks: signed,
                            magnitude_ticks: magnitude,
                            orientation: Orientation::parse(&orientation)
                                .ok_or_else(|| bad(line, format!("unknown orientation `{orientation}`")))?,
                        },
                        seconds: secs(&seconds)?,
                    });
                }
                Wire::Arrow { kind, from, to } => {
                    let kind = match kind.as_str() {
                        "QAT" => ArrowKind::Qat,
                        "CAT" => ArrowKind::Cat,
                        other => return Err(bad(line, format!("unknown arrow kind `{other}`"))),
                    };
                    let event = |s: &str| EventRef::parse(s).ok_or_else(|| bad(line, format!("bad event reference `{s}`")));
                    let (from, to) = (event(&from)?, event(&to)?);
                    let EventRef::Mem { detector, .. } = &to else {
                        return Err(bad(line, "an arrow must end at a memory record".into()));
                    };
                    arrows.push(ArrowOfTime { kind, detector: detector.clone(), from, to });
                }
                Wire::Timeline { detector, position, addr, tick, simultaneous } => {
                    let det = id(&detector)?;
                    if timelines.last().map(|(d, _)| d != &det).unwrap_or(true) {
                        timelines.push((det, Vec::new()));
                    }
                    let entries = &mut timelines.last_mut().expect("just pushed").1;
                    if position != entries.len() as u64 {
                        return Err(bad(line, format!("timeline position {position} out of sequence")));
                    }
                    entries.push(TimelineEntry { addr, tick, simultaneous });
                }
                Wire::Frame { index, detected, regime, rate } => frames.push(AttentionFrame {
                    cycle_index: index,
                    detected,
                    regime: Regime::parse(&regime).ok_or_else(|| bad(line, format!("unknown regime `{regime}`")))?,
                    rate: parse_rational(&rate).map_err(|e| bad(line, e.to_string()))?,
                }),
                Wire::End { reason, steps } => {
                    let termination = Termination::parse(&reason)
                        .ok_or_else(|| bad(line, format!("unknown termination `{reason}`")))?;
                    footer = Some(TraceFooter { termination, steps });
                }
            }
        }
        let (version, digest, seed) = header.ok_or(TraceError::MissingHeader)?;
        let mut next_addr: BTreeMap<&NodeId, u64> = BTreeMap::new();
        for r in &labels {
            let expected = next_addr.entry(&r.detector).or_default();
            if r.addr != *expected {
                return Err(TraceError::AddressGap(r.detector.clone()));
            }
            *expected += 1;
            if !clocks.iter().any(|(id, _)| id == &r.label.sc_id) {
                return Err(TraceError::UnknownClock(r.label.sc_id.clone()));
            }
        }
        Ok(Trace {
            header: TraceHeader { version, digest, seed, clocks },
            events,
            labels,
            deltas,
            arrows,
            timelines,
            frames,
            footer: footer.ok_or(TraceError::MissingFooter)?,
        })
    }
}

fn arrow_kind_str(kind: ArrowKind) -> &'static str {
    match kind {
        ArrowKind::Qat => "QAT",
        ArrowKind::Cat => "CAT",
    }
}

/// One trace record as it appears on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "section", rename_all = "lowercase")]
enum Wire {
    Trace { magic: String, version: String, digest: String, seed: u64 },
    Clock { sc: String, period: String },
    Event {
        step: u64,
        coord: String,
        kind: String,
        node: String,
        origin: Option<String>,
        emission: Option<u64>,
        addr: Option<u64>,
    },
    Label { seq: u64, detector: String, addr: u64, tick: u64, sc: String, origin: String, slots: String, provenance: String },
    Delta { detector: String, from: u64, to: u64, signed: i64, magnitude: u64, orientation: String, seconds: String },
    Arrow { kind: String, from: String, to: String },
    Timeline { detector: String, position: u64, addr: u64, tick: u64, simultaneous: bool },
    Frame { index: u64, detected: u64, regime: String, rate: String },
    End { reason: String, steps: u64 },
}

impl Wire {
    fn from_text(line: &str) -> Result<Wire, String> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let want = |n: usize| {
            if fields.len() == n {
                Ok(())
            } else {
                Err(format!("{} record needs {} fields, found {}", fields[0], n - 1, fields.len() - 1))
            }
        };
        let num = |s: &str| s.parse::<u64>().map_err(|_| format!("expected an unsigned integer, found `{s}`"));
        let opt = |s: &str| -> Result<Option<u64>, String> { if s == "-" { Ok(None) } else { num(s).map(Some) } };
        Ok(match fields[0] {
            "TRACE" => {
                want(5)?;
                Wire::Trace {
                    magic: fields[1].into(),
                    version: fields[2].into(),
                    digest: fields[3].into(),
                    seed: num(fields[4])?,
                }
            }
            "CLOCK" => {
                want(3)?;
                Wire::Clock { sc: fields[1].into(), period: fields[2].into() }
            }
            "EVENT" => {
                want(8)?;
                let origin = (fields[5] != "-").then(|| fields[5].to_string());
                Wire::Event {
                    step: num(fields[1])?,
                    coord: fields[2].into(),
                    kind: fields[3].into(),
                    node: fields[4].into(),
                    origin,
                    emission: opt(fields[6])?,
                    addr: opt(fields[7])?,
                }
            }
            "LABEL" => {
                want(9)?;
                Wire::Label {
                    seq: num(fields[1])?,
                    addr: num(fields[2])?,
                    tick: num(fields[3])?,
                    detector: fields[4].into(),
                    sc: fields[5].into(),
                    origin: fields[6].into(),
                    slots: fields[7].into(),
                    provenance: fields[8].into(),
                }
            }
            "DELTA" => {
                want(8)?;
                Wire::Delta {
                    detector: fields[1].into(),
                    from: num(fields[2])?,
                    to: num(fields[3])?,
                    signed: fields[4].parse().map_err(|_| format!("expected an integer, found `{}`", fields[4]))?,
                    magnitude: num(fields[5])?,
                    orientation: fields[6].into(),
                    seconds: fields[7].into(),
                }
            }
            "ARROW" => {
                want(5)?;
                if fields[3] != "->" {
                    return Err(format!("expected `->`, found `{}`", fields[3]));
                }
                Wire::Arrow { kind: fields[1].into(), from: fields[2].into(), to: fields[4].into() }
            }
            "TIMELINE" => {
                want(6)?;
                let simultaneous = match fields[5] {
                    "sim" => true,
                    "-" => false,
                    other => return Err(format!("expected `sim` or `-`, found `{other}`")),
                };
                Wire::Timeline {
                    detector: fields[1].into(),
                    position: num(fields[2])?,
                    addr: num(fields[3])?,
                    tick: num(fields[4])?,
                    simultaneous,
                }
            }
            "FRAME" => {
                want(5)?;
                Wire::Frame {
                    index: num(fields[1])?,
                    detected: num(fields[2])?,
                    regime: fields[3].into(),
                    rate: fields[4].into(),
                }
            }
            "END" => {
                want(3)?;
                Wire::End { reason: fields[1].into(), steps: num(fields[2])? }
            }
            other => return Err(format!("unknown record `{other}`")),
        })
    }
}
