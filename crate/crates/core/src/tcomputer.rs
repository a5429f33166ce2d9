//! The time-computing pipeline: decay and tick emission, detection with a hold
//! buffer, pairing held infostates with standard-clock ticks into labeled
//! memory records, and the comparator that turns two labels into an elapsed
//! time.
//!
//! Handlers here are pure state transitions on a single node. Scheduling the
//! signals they emit is the engine's job.

use std::fmt;

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::ids::NodeId;
use crate::infostate::{concat, make_qword, read_slot, InfostateError, Origin, Qubit, Qword, Tag, TICK_UNIT};
use crate::network::{DetectorNode, FcNode, Infostate, Phase, StandardClock};
use crate::rational::{Rational, Seconds};

/// Slot tags of the two-label comparison word built by [`fetch_pair`].
pub const FROM_LABEL_TAG: &str = "label.from";
pub const TO_LABEL_TAG: &str = "label.to";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("feynman clock `{0}` is not excited")]
    NotExcited(NodeId),
    #[error("detector `{detector}` received a tick-bearing qword on its signal channel")]
    ChannelMismatch { detector: NodeId },
    #[error("detector `{detector}` is clocked by `{expected}`, got a tick from `{got}`")]
    ForeignClock { detector: NodeId, expected: NodeId, got: NodeId },
    #[error("address {addr} out of range for a bank of {len} records")]
    AddressOutOfRange { addr: u64, len: usize },
    #[error("comparison word must carry exactly two tick labels")]
    MalformedPair,
    #[error(transparent)]
    Infostate(#[from] InfostateError),
}

/// A standard-clock tick used as a time label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeLabel {
    pub tick: u64,
    pub sc_id: NodeId,
}

/// One labeled event in a detector's memory bank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MemoryRecord {
    pub detector: NodeId,
    pub addr: u64,
    pub label: TimeLabel,
    /// The FC payload concatenated with the tick payload.
    pub event: Qword,
    /// The Feynman clock whose decay produced the event.
    pub origin: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Forward,
    Backward,
    Simultaneous,
}

impl Orientation {
    pub fn of(signed_ticks: i64) -> Self {
        match signed_ticks.signum() {
            1 => Orientation::Forward,
            -1 => Orientation::Backward,
            _ => Orientation::Simultaneous,
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "forward" => Some(Orientation::Forward),
            "backward" => Some(Orientation::Backward),
            "simultaneous" => Some(Orientation::Simultaneous),
            _ => None,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Forward => "forward",
            Orientation::Backward => "backward",
            Orientation::Simultaneous => "simultaneous",
        })
    }
}

/// Comparator output for a pair of memory addresses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaRecord {
    pub from_addr: u64,
    pub to_addr: u64,
    pub signed_ticks: i64,
    pub magnitude_ticks: u64,
    pub orientation: Orientation,
}

impl DeltaRecord {
    pub fn from_ticks(from_addr: u64, to_addr: u64, from_tick: u64, to_tick: u64) -> Self {
        let signed_ticks = to_tick as i64 - from_tick as i64;
        DeltaRecord {
            from_addr,
            to_addr,
            signed_ticks,
            magnitude_ticks: signed_ticks.unsigned_abs(),
            orientation: Orientation::of(signed_ticks),
        }
    }
}

/// Excited FC relaxes to ground and emits its template payload.
pub fn decay_fc(fc: &mut FcNode) -> Result<Infostate, PipelineError> {
    if fc.phase != Phase::Excited {
        return Err(PipelineError::NotExcited(fc.id.clone()));
    }
    let index = fc.emissions;
    let payload = make_qword(fc.emission_template.clone(), Origin::new(fc.id.clone(), index))?;
    fc.phase = Phase::Ground;
    fc.emissions += 1;
    Ok(Infostate {
        payload,
        origin: fc.id.clone(),
        emission_index: index,
        hops: 0,
    })
}

/// Emits the current tick label and advances the counter.
pub fn tick_sc(sc: &mut StandardClock) -> Infostate {
    let tau = sc.next_tick;
    sc.next_tick += 1;
    let payload = make_qword(vec![Qubit::tick(tau)], Origin::new(sc.id.clone(), tau))
        .expect("one tick slot is a valid qword");
    Infostate {
        payload,
        origin: sc.id.clone(),
        emission_index: tau,
        hops: 0,
    }
}

/// Holds an FC-channel arrival until the next tick.
pub fn detect(d: &mut DetectorNode, s: Infostate) -> Result<(), PipelineError> {
    if s.payload.has_tick_slot() {
        return Err(PipelineError::ChannelMismatch { detector: d.id.clone() });
    }
    d.hold_buffer.push_back(s);
    Ok(())
}

/// Labels every held infostate with this tick, in FIFO order, and stores the
/// results at consecutive addresses. The buffer is left empty.
pub fn pair_on_tick(d: &mut DetectorNode, tick_signal: &Infostate) -> Result<Vec<MemoryRecord>, PipelineError> {
    if tick_signal.origin != d.sc_source {
        return Err(PipelineError::ForeignClock {
            detector: d.id.clone(),
            expected: d.sc_source.clone(),
            got: tick_signal.origin.clone(),
        });
    }
    let tick = read_slot(&tick_signal.payload, &Tag::TickLabel)
        .map_err(|_| PipelineError::MalformedPair)?
        .tick_value()
        .ok_or(PipelineError::MalformedPair)?;
    let mut out = Vec::with_capacity(d.hold_buffer.len());
    while let Some(held) = d.hold_buffer.pop_front() {
        let record = MemoryRecord {
            detector: d.id.clone(),
            addr: d.memory_bank.len() as u64,
            label: TimeLabel { tick, sc_id: d.sc_source.clone() },
            event: concat(&held.payload, &tick_signal.payload)?,
            origin: held.origin,
        };
        d.memory_bank.push(record.clone());
        out.push(record);
    }
    Ok(out)
}

/// Shifts the tick labels of records `k` and `k_plus_m` into a two-slot
/// comparison word `(t_k, t_{k+m})`.
pub fn fetch_pair(bank: &[MemoryRecord], k: u64, k_plus_m: u64) -> Result<Qword, PipelineError> {
    let get = |addr: u64| {
        bank.get(addr as usize)
            .ok_or(PipelineError::AddressOutOfRange { addr, len: bank.len() })
    };
    let (from, to) = (get(k)?, get(k_plus_m)?);
    let label_slot = |name: &str, rec: &MemoryRecord| -> Result<Qword, PipelineError> {
        let slot = Qubit::new(Tag::custom(name), Rational::from_integer(rec.label.tick.into()), TICK_UNIT)?;
        Ok(make_qword(vec![slot], Origin::new(rec.detector.clone(), rec.addr))?)
    };
    Ok(concat(&label_slot(FROM_LABEL_TAG, from)?, &label_slot(TO_LABEL_TAG, to)?)?)
}

/// Subtracts the labels held in a comparison word: `t_{k+m} - t_k`.
pub fn subtract_labels(paired: &Qword, k: u64, k_plus_m: u64) -> Result<DeltaRecord, PipelineError> {
    if paired.len() != 2 {
        return Err(PipelineError::MalformedPair);
    }
    let tick = |name: &str| -> Result<u64, PipelineError> {
        let slot = read_slot(paired, &Tag::custom(name)).map_err(|_| PipelineError::MalformedPair)?;
        let v = slot.value();
        if !v.is_integer() || v.is_negative() {
            return Err(PipelineError::MalformedPair);
        }
        v.to_integer().to_u64().ok_or(PipelineError::MalformedPair)
    };
    Ok(DeltaRecord::from_ticks(k, k_plus_m, tick(FROM_LABEL_TAG)?, tick(TO_LABEL_TAG)?))
}

/// Converts a label difference into classical elapsed seconds.
pub fn time_operator(delta: &DeltaRecord, period: &Seconds) -> Seconds {
    period * &Rational::from_integer(delta.magnitude_ticks.into())
}

/// Space-time extent of a process: distance times elapsed time, in m·s.
pub fn spacetime_extent(length_m: &Rational, elapsed: &Seconds) -> Rational {
    length_m * elapsed.as_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::node;
    use crate::infostate::qword_len;
    use crate::network::LifetimeModel;
    use crate::rational::{int, parse_rational, ratio};
    use std::collections::VecDeque;

    fn pion_fc(phase: Phase) -> FcNode {
        FcNode {
            id: node("A"),
            lifetime_model: LifetimeModel::Deterministic(Seconds::parse("5e-24").unwrap()),
            decay_energy: int(139_570_000),
            emission_template: vec![
                Qubit::new(Tag::Energy, int(139_570_000), "eV").unwrap(),
                Qubit::new(Tag::Mass, int(139_570_000), "eV/c^2").unwrap(),
            ],
            phase,
            emissions: 0,
        }
    }

    fn detector() -> DetectorNode {
        DetectorNode {
            id: node("D0"),
            hold_buffer: VecDeque::new(),
            memory_bank: Vec::new(),
            sc_source: node("S"),
        }
    }

    fn clock() -> StandardClock {
        StandardClock {
            id: node("S"),
            period: Seconds::parse("1e-24").unwrap(),
            next_tick: 0,
        }
    }

    fn tick_at(n: u64) -> Infostate {
        let mut sc = clock();
        sc.next_tick = n;
        tick_sc(&mut sc)
    }

    fn fc_signal(name: &str) -> Infostate {
        let mut fc = pion_fc(Phase::Excited);
        fc.id = node(name);
        decay_fc(&mut fc).unwrap()
    }

    #[test]
    fn decay_moves_to_ground_and_emits_template() {
        let mut fc = pion_fc(Phase::Excited);
        let s = decay_fc(&mut fc).unwrap();
        assert_eq!(fc.phase, Phase::Ground);
        assert_eq!(fc.emissions, 1);
        assert_eq!(s.payload.slots(), &fc.emission_template[..]);
        assert_eq!(s.emission_index, 0);
        assert_eq!(s.payload.first_origin(), &Origin::new(node("A"), 0));
    }

    #[test]
    fn decay_of_ground_fc_fails() {
        let mut fc = pion_fc(Phase::Ground);
        assert_eq!(decay_fc(&mut fc), Err(PipelineError::NotExcited(node("A"))));
    }

    #[test]
    fn tick_counter() {
        let mut sc = clock();
        let first = tick_sc(&mut sc);
        assert_eq!(read_slot(&first.payload, &Tag::TickLabel).unwrap().tick_value(), Some(0));
        assert_eq!(sc.next_tick, 1);
        let labels: Vec<u64> = (0..4)
            .map(|_| tick_sc(&mut sc).emission_index)
            .collect();
        assert_eq!(labels, [1, 2, 3, 4]);
    }

    #[test]
    fn detect_is_fifo() {
        let mut d = detector();
        detect(&mut d, fc_signal("A")).unwrap();
        assert_eq!(d.hold_buffer.len(), 1);
        detect(&mut d, fc_signal("B")).unwrap();
        let order: Vec<&str> = d.hold_buffer.iter().map(|s| s.origin.as_str()).collect();
        assert_eq!(order, ["A", "B"]);
    }

    #[test]
    fn detect_rejects_tick_on_signal_channel() {
        let mut d = detector();
        assert_eq!(
            detect(&mut d, tick_at(3)),
            Err(PipelineError::ChannelMismatch { detector: node("D0") })
        );
    }

    #[test]
    fn pairing_labels_held_signal() {
        let mut d = detector();
        detect(&mut d, fc_signal("A")).unwrap();
        let recs = pair_on_tick(&mut d, &tick_at(5)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].addr, 0);
        assert_eq!(recs[0].label.tick, 5);
        assert_eq!(qword_len(&recs[0].event), 3);
        assert!(d.hold_buffer.is_empty());
        assert_eq!(d.memory_bank, recs);
    }

    #[test]
    fn empty_buffer_tick_is_noop() {
        let mut d = detector();
        assert!(pair_on_tick(&mut d, &tick_at(7)).unwrap().is_empty());
        assert!(d.memory_bank.is_empty());
    }

    #[test]
    fn broadcast_tick_labels_all_held_in_order() {
        let mut d = detector();
        detect(&mut d, fc_signal("A")).unwrap();
        detect(&mut d, fc_signal("B")).unwrap();
        let recs = pair_on_tick(&mut d, &tick_at(9)).unwrap();
        let summary: Vec<(u64, u64, &str)> = recs
            .iter()
            .map(|r| (r.addr, r.label.tick, r.origin.as_str()))
            .collect();
        assert_eq!(summary, [(0, 9, "A"), (1, 9, "B")]);
    }

    #[test]
    fn foreign_clock_rejected() {
        let mut d = detector();
        let mut other = clock();
        other.id = node("S2");
        let err = pair_on_tick(&mut d, &tick_sc(&mut other)).unwrap_err();
        assert!(matches!(err, PipelineError::ForeignClock { .. }));
    }

    fn bank_5_9() -> Vec<MemoryRecord> {
        let mut d = detector();
        detect(&mut d, fc_signal("A")).unwrap();
        pair_on_tick(&mut d, &tick_at(5)).unwrap();
        detect(&mut d, fc_signal("B")).unwrap();
        pair_on_tick(&mut d, &tick_at(9)).unwrap();
        d.memory_bank
    }

    #[test]
    fn fetch_pair_carries_both_labels() {
        let bank = bank_5_9();
        let pair = fetch_pair(&bank, 0, 1).unwrap();
        let values: Vec<Rational> = pair.slots().iter().map(|s| s.value().clone()).collect();
        assert_eq!(values, [int(5), int(9)]);
        let selfpair = fetch_pair(&bank, 0, 0).unwrap();
        assert_eq!(selfpair.slots()[0].value(), selfpair.slots()[1].value());
        assert_eq!(
            fetch_pair(&bank, 0, 99),
            Err(PipelineError::AddressOutOfRange { addr: 99, len: 2 })
        );
    }

    #[test]
    fn subtraction_cases() {
        let bank = bank_5_9();
        let fwd = subtract_labels(&fetch_pair(&bank, 0, 1).unwrap(), 0, 1).unwrap();
        assert_eq!((fwd.signed_ticks, fwd.magnitude_ticks, fwd.orientation), (4, 4, Orientation::Forward));
        let zero = subtract_labels(&fetch_pair(&bank, 1, 1).unwrap(), 1, 1).unwrap();
        assert_eq!((zero.signed_ticks, zero.orientation), (0, Orientation::Simultaneous));
        let back = subtract_labels(&fetch_pair(&bank, 1, 0).unwrap(), 1, 0).unwrap();
        assert_eq!((back.signed_ticks, back.magnitude_ticks, back.orientation), (-4, 4, Orientation::Backward));
    }

    #[test]
    fn subtract_rejects_malformed_words() {
        let single = make_qword(vec![Qubit::tick(1)], Origin::new(node("S"), 1)).unwrap();
        assert_eq!(subtract_labels(&single, 0, 1), Err(PipelineError::MalformedPair));
        let wrong = make_qword(
            vec![
                Qubit::new(Tag::Energy, int(1), "eV").unwrap(),
                Qubit::new(Tag::Mass, int(2), "eV").unwrap(),
            ],
            Origin::new(node("A"), 0),
        )
        .unwrap();
        assert_eq!(subtract_labels(&wrong, 0, 1), Err(PipelineError::MalformedPair));
    }

    #[test]
    fn time_operator_examples() {
        let period = Seconds::parse("1e-24").unwrap();
        let five = DeltaRecord::from_ticks(0, 1, 0, 5);
        assert_eq!(time_operator(&five, &period), Seconds::parse("5e-24").unwrap());
        let zero = DeltaRecord::from_ticks(0, 0, 3, 3);
        assert_eq!(time_operator(&zero, &period), Seconds::zero());
        let four = DeltaRecord::from_ticks(0, 1, 0, 4);
        assert_eq!(time_operator(&four, &Seconds(ratio(1, 3))), Seconds(ratio(4, 3)));
    }

    #[test]
    fn pion_spacetime_extent() {
        let d = parse_rational("1.5e-15").unwrap();
        let t = Seconds::parse("5e-24").unwrap();
        assert_eq!(spacetime_extent(&d, &t), parse_rational("7.5e-39").unwrap());
    }

    proptest::proptest! {
        #[test]
        fn magnitude_symmetry(a in 0u64..1_000_000, b in 0u64..1_000_000) {
            let ab = DeltaRecord::from_ticks(0, 1, a, b);
            let ba = DeltaRecord::from_ticks(1, 0, b, a);
            proptest::prop_assert_eq!(ab.magnitude_ticks, ba.magnitude_ticks);
            proptest::prop_assert_eq!(ab.signed_ticks, -ba.signed_ticks);
            let flipped = match ab.orientation {
                Orientation::Forward => Orientation::Backward,
                Orientation::Backward => Orientation::Forward,
                Orientation::Simultaneous => Orientation::Simultaneous,
            };
            proptest::prop_assert_eq!(ba.orientation, flipped);
        }
    }
}
