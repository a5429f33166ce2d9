//! Qubits, qwords and qsentences: the information carried by signals.
//!
//! A [`Qubit`] is one tagged observable slot (energy, mass, a tick label...),
//! not a two-level quantum state. A [`Qword`] is an ordered, nonempty run of
//! slots plus provenance: one origin marker per concatenated segment, so a
//! qsentence built by the detector still knows which node produced each part.
//!
//! Text rendering is `tag=value[unit]`, slots joined by `;`, segments joined by
//! `|`. Provenance renders separately as `node/index` markers joined by `|`.

use std::fmt;

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::ids::{InvalidNodeId, NodeId};
use crate::rational::{format_rational, parse_rational, NumberError, Rational};

/// Unit carried by every tick-label slot.
pub const TICK_UNIT: &str = "tick";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InfostateError {
    #[error("a qword needs at least one slot")]
    EmptyQword,
    #[error("a qword may hold only one tick-label slot")]
    DuplicateTickSlot,
    #[error("no `{0}` slot in qword")]
    MissingSlot(String),
    #[error("more than one `{0}` slot in qword")]
    AmbiguousSlot(String),
    #[error("tick-label slot must be a nonnegative integer in unit `tick`")]
    InvalidTickSlot,
    #[error("invalid slot tag `{0}`")]
    InvalidTag(String),
    #[error("invalid unit `{0}`")]
    InvalidUnit(String),
    #[error("malformed slot `{0}`")]
    MalformedSlot(String),
    #[error("malformed provenance `{0}`")]
    MalformedProvenance(String),
    #[error("provenance lists {markers} segments but slots have {segments}")]
    SegmentMismatch { markers: usize, segments: usize },
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error(transparent)]
    NodeId(#[from] InvalidNodeId),
}

/// Observable kind of a slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    ConfigIndex,
    Energy,
    Mass,
    Momentum,
    Position,
    Direction,
    TickLabel,
    Custom(String),
}

impl Tag {
    pub fn parse(text: &str) -> Result<Self, InfostateError> {
        Ok(match text {
            "n" => Tag::ConfigIndex,
            "energy" => Tag::Energy,
            "mass" => Tag::Mass,
            "momentum" => Tag::Momentum,
            "position" => Tag::Position,
            "direction" => Tag::Direction,
            "tick" => Tag::TickLabel,
            other => match other.strip_prefix("custom:") {
                Some(name) if valid_custom_name(name) => Tag::Custom(name.to_string()),
                _ => return Err(InfostateError::InvalidTag(other.to_string())),
            },
        })
    }

    pub fn custom(name: &str) -> Self {
        Tag::Custom(name.to_string())
    }
}

fn valid_custom_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':'))
}

fn valid_unit(unit: &str) -> bool {
    unit.chars()
        .all(|c| !c.is_whitespace() && !matches!(c, '[' | ']' | ';' | '|'))
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::ConfigIndex => f.write_str("n"),
            Tag::Energy => f.write_str("energy"),
            Tag::Mass => f.write_str("mass"),
            Tag::Momentum => f.write_str("momentum"),
            Tag::Position => f.write_str("position"),
            Tag::Direction => f.write_str("direction"),
            Tag::TickLabel => f.write_str("tick"),
            Tag::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

/// One tagged observable slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Qubit {
    tag: Tag,
    value: Rational,
    unit: String,
}

impl Qubit {
    pub fn new(tag: Tag, value: Rational, unit: impl Into<String>) -> Result<Self, InfostateError> {
        let unit = unit.into();
        if let Tag::Custom(name) = &tag {
            if !valid_custom_name(name) {
                return Err(InfostateError::InvalidTag(name.clone()));
            }
        }
        if !valid_unit(&unit) {
            return Err(InfostateError::InvalidUnit(unit));
        }
        if tag == Tag::TickLabel
            && (unit != TICK_UNIT || !value.is_integer() || value.is_negative())
        {
            return Err(InfostateError::InvalidTickSlot);
        }
        Ok(Qubit { tag, value, unit })
    }

    /// The tick-label ("tubit") slot for tick `tau`.
    pub fn tick(tau: u64) -> Self {
        Qubit {
            tag: Tag::TickLabel,
            value: Rational::from_integer(tau.into()),
            unit: TICK_UNIT.to_string(),
        }
    }

    pub fn tag(&self) -> &Tag {
        &self.tag
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    /// Integer value of a tick-label slot.
    pub fn tick_value(&self) -> Option<u64> {
        (self.tag == Tag::TickLabel)
            .then(|| self.value.to_integer().to_u64())
            .flatten()
    }

    /// Same slot with a different value; used when mirroring processes.
    pub fn with_value(&self, value: Rational) -> Result<Self, InfostateError> {
        Qubit::new(self.tag.clone(), value, self.unit.clone())
    }

    pub fn with_tag(&self, tag: Tag) -> Result<Self, InfostateError> {
        Qubit::new(tag, self.value.clone(), self.unit.clone())
    }

    pub fn parse(text: &str) -> Result<Self, InfostateError> {
        let malformed = || InfostateError::MalformedSlot(text.to_string());
        let (tag, rest) = text.split_once('=').ok_or_else(malformed)?;
        let open = rest.find('[').ok_or_else(malformed)?;
        if !rest.ends_with(']') {
            return Err(malformed());
        }
        let value = parse_rational(&rest[..open])?;
        let unit = &rest[open + 1..rest.len() - 1];
        Qubit::new(Tag::parse(tag)?, value, unit)
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}[{}]", self.tag, format_rational(&self.value), self.unit)
    }
}

/// Where a qword segment came from: emitting node plus its emission counter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Origin {
    pub node: NodeId,
    pub index: u64,
}

impl Origin {
    pub fn new(node: NodeId, index: u64) -> Self {
        Origin { node, index }
    }

    pub fn parse(text: &str) -> Result<Self, InfostateError> {
        let (node, index) = text
            .split_once('/')
            .ok_or_else(|| InfostateError::MalformedProvenance(text.to_string()))?;
        let index = index
            .parse()
            .map_err(|_| InfostateError::MalformedProvenance(text.to_string()))?;
        Ok(Origin { node: NodeId::new(node)?, index })
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.node, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub origin: Origin,
    pub len: usize,
}

/// Ordered information word. Concatenations of qwords are qsentences.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Qword {
    slots: Vec<Qubit>,
    provenance: Vec<Segment>,
}

fn tick_slots(slots: &[Qubit]) -> usize {
    slots.iter().filter(|q| q.tag == Tag::TickLabel).count()
}

/// Builds a single-segment qword.
pub fn make_qword(entries: Vec<Qubit>, origin: Origin) -> Result<Qword, InfostateError> {
    if entries.is_empty() {
        return Err(InfostateError::EmptyQword);
    }
    if tick_slots(&entries) > 1 {
        return Err(InfostateError::DuplicateTickSlot);
    }
    let len = entries.len();
    Ok(Qword {
        slots: entries,
        provenance: vec![Segment { origin, len }],
    })
}

/// `a ++ b`, slots and provenance both appended.
pub fn concat(a: &Qword, b: &Qword) -> Result<Qword, InfostateError> {
    if tick_slots(&a.slots) + tick_slots(&b.slots) > 1 {
        return Err(InfostateError::DuplicateTickSlot);
    }
    let mut slots = a.slots.clone();
    slots.extend(b.slots.iter().cloned());
    let mut provenance = a.provenance.clone();
    provenance.extend(b.provenance.iter().cloned());
    Ok(Qword { slots, provenance })
}

/// The unique slot carrying `tag`.
pub fn read_slot<'q>(q: &'q Qword, tag: &Tag) -> Result<&'q Qubit, InfostateError> {
    let mut hits = q.slots.iter().filter(|s| &s.tag == tag);
    let first = hits
        .next()
        .ok_or_else(|| InfostateError::MissingSlot(tag.to_string()))?;
    if hits.next().is_some() {
        return Err(InfostateError::AmbiguousSlot(tag.to_string()));
    }
    Ok(first)
}

pub fn qword_len(q: &Qword) -> usize {
    q.slots.len()
}

impl Qword {
    pub fn slots(&self) -> &[Qubit] {
        &self.slots
    }

    pub fn provenance(&self) -> &[Segment] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    /// Always false; qwords are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn has_tick_slot(&self) -> bool {
        tick_slots(&self.slots) > 0
    }

    /// Origin of the first segment.
    pub fn first_origin(&self) -> &Origin {
        &self.provenance[0].origin
    }

    /// `tag=value[unit]` slots, `;` within a segment, `|` between segments.
    pub fn render_slots(&self) -> String {
        let mut out = String::new();
        let mut at = 0;
        for (i, seg) in self.provenance.iter().enumerate() {
            if i > 0 {
                out.push('|');
            }
            let rendered: Vec<String> = self.slots[at..at + seg.len]
                .iter()
                .map(Qubit::to_string)
                .collect();
            out.push_str(&rendered.join(";"));
            at += seg.len;
        }
        out
    }

    pub fn render_provenance(&self) -> String {
        let markers: Vec<String> = self.provenance.iter().map(|s| s.origin.to_string()).collect();
        markers.join("|")
    }

    /// Inverse of [`render_slots`](Self::render_slots) +
    /// [`render_provenance`](Self::render_provenance).
    pub fn parse(slots: &str, provenance: &str) -> Result<Self, InfostateError> {
        let segments: Vec<&str> = slots.split('|').collect();
        let markers: Vec<&str> = provenance.split('|').collect();
        if segments.len() != markers.len() {
            return Err(InfostateError::SegmentMismatch {
                markers: markers.len(),
                segments: segments.len(),
            });
        }
        let mut word: Option<Qword> = None;
        for (seg, marker) in segments.iter().zip(markers) {
            let part = make_qword(parse_slot_list(seg)?, Origin::parse(marker)?)?;
            word = Some(match word {
                None => part,
                Some(prev) => concat(&prev, &part)?,
            });
        }
        word.ok_or(InfostateError::EmptyQword)
    }
}

/// `;`-separated slot list; empty input yields no slots.
pub fn parse_slot_list(text: &str) -> Result<Vec<Qubit>, InfostateError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';').map(Qubit::parse).collect()
}

pub fn render_slot_list(slots: &[Qubit]) -> String {
    slots.iter().map(Qubit::to_string).collect::<Vec<_>>().join(";")
}
