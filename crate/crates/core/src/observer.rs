//! Subjective time: an observer's attention cycles sample a clock pulse
//! train, and the count per cycle against a "normal" count gives the
//! perceived rate of the outside world.

use std::fmt;

use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObserverError {
    #[error("tick stream is not sorted ascending at position {0}")]
    UnsortedStream(usize),
    #[error("normal reference count must be positive")]
    ZeroReference,
    #[error("cycle width must be positive")]
    InvalidWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Fast,
    Normal,
    Slow,
}

impl Regime {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "Fast" => Some(Regime::Fast),
            "Normal" => Some(Regime::Normal),
            "Slow" => Some(Regime::Slow),
            _ => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Fast => "Fast",
            Regime::Normal => "Normal",
            Regime::Slow => "Slow",
        })
    }
}

/// One tick-tock cycle of the observer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttentionFrame {
    pub cycle_index: u64,
    pub detected: u64,
    pub regime: Regime,
    pub rate: Rational,
}

impl fmt::Display for AttentionFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FRAME {} {} {} {}",
            self.cycle_index,
            self.detected,
            self.regime,
            format_rational(&self.rate)
        )
    }
}

/// `detected / normal_reference`: above one the world seems fast.
pub fn subjective_rate(detected: u64, normal_reference: u64) -> Result<Rational, ObserverError> {
    if normal_reference == 0 {
        return Err(ObserverError::ZeroReference);
    }
    Ok(Rational::new(detected.into(), normal_reference.into()))
}

fn classify(detected: u64, normal_reference: u64) -> Regime {
    match detected.cmp(&normal_reference) {
        std::cmp::Ordering::Greater => Regime::Fast,
        std::cmp::Ordering::Less => Regime::Slow,
        std::cmp::Ordering::Equal => Regime::Normal,
    }
}

/// Splits the stream into windows `[i·w, (i+1)·w)` starting at tick 0 and
/// counts ticks per window. Frames run from window 0 through the window of
/// the last tick, empty windows included.
pub fn perceive(
    tick_stream: &[u64],
    cycle_width_ticks: &Rational,
    normal_reference: u64,
) -> Result<Vec<AttentionFrame>, ObserverError> {
    if !cycle_width_ticks.is_positive() {
        return Err(ObserverError::InvalidWidth);
    }
    if normal_reference == 0 {
        return Err(ObserverError::ZeroReference);
    }
    if let Some(i) = tick_stream.windows(2).position(|w| w[1] < w[0]) {
        return Err(ObserverError::UnsortedStream(i + 1));
    }
    let Some(&last) = tick_stream.last() else {
        return Ok(Vec::new());
    };
    let window_of = |t: u64| -> u64 {
        let q = Rational::from_integer(t.into()) / cycle_width_ticks;
        q.floor().to_integer().to_u64().unwrap_or(u64::MAX)
    };
    let frames = window_of(last) + 1;
    let mut counts = vec![0u64; frames as usize];
    for &t in tick_stream {
        counts[window_of(t) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, detected)| {
            Ok(AttentionFrame {
                cycle_index: i as u64,
                detected,
                regime: classify(detected, normal_reference),
                rate: subjective_rate(detected, normal_reference)?,
            })
        })
        .collect()
}

/// Parses `a..b` (inclusive) or a comma list like `0,1,5`.
pub fn parse_tick_stream(text: &str) -> Option<Vec<u64>> {
    let text = text.trim();
    if text.is_empty() {
        return Some(Vec::new());
    }
    if let Some((a, b)) = text.split_once("..") {
        let (a, b): (u64, u64) = (a.parse().ok()?, b.parse().ok()?);
        return (a <= b).then(|| (a..=b).collect());
    }
    text.split(',').map(|t| t.trim().parse().ok()).collect()
}

impl AttentionFrame {
    pub fn is_consistent(&self) -> bool {
        let one = Rational::from_integer(1.into());
        match self.regime {
            Regime::Fast => self.rate > one,
            Regime::Slow => self.rate < one,
            Regime::Normal => self.rate == one,
        }
    }
}
