//! Deterministic discrete-event simulator for causal networks of decaying
//! Feynman clocks, standard tick clocks and labeling detectors.
//!
//! Elapsed times, timelines and arrows of time are derived only from tick
//! labels; the scheduler's internal coordinates never reach those outputs.
//! Each run can be checked against a happens-before oracle built from the
//! substrate log.
//!
//! ```
//! use chronode_core::{build_network, parse_scenario, presets};
//!
//! let spec = parse_scenario(presets::PIMESON).unwrap();
//! let trace = build_network(&spec, 1).unwrap().run_until_quiescent(10_000).unwrap();
//! assert_eq!(trace.labels[0].label.tick, 5);
//! ```

pub mod chronology;
pub mod ids;
pub mod infostate;
pub mod network;
pub mod observer;
pub mod presets;
pub mod rational;
pub mod scenario;
pub mod synth;
pub mod tcomputer;
pub mod trace;

pub use chronology::{
    build_arrows, build_timeline, happens_before, is_linear_extension, mirror_process, qat_directions, ArrowKind,
    ArrowOfTime, EventRef, HappensBefore, TimelineEntry, Verdict,
};
pub use ids::NodeId;
pub use infostate::{concat, make_qword, read_slot, Qubit, Qword, Tag};
pub use network::{build_network, BuildError, EngineError, EngineState, EventKind, SubstrateEvent, TieBreak};
pub use observer::{perceive, subjective_rate, AttentionFrame, Regime};
pub use rational::{format_rational, parse_rational, Rational, Seconds};
pub use scenario::{parse_scenario, ScenarioError, ScenarioSpec};
pub use tcomputer::{spacetime_extent, time_operator, DeltaRecord, MemoryRecord, Orientation};
pub use trace::{Trace, TraceError, TraceFormat};
