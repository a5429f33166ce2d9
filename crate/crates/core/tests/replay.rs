mod common;

use chronode_core::synth::random_scenario;
use chronode_core::{build_arrows, parse_scenario, presets, Trace};

use common::run;

#[test]
fn replayed_trace_reproduces_derived_sections() {
    for seed in 0..100 {
        let trace = run(&random_scenario(seed, 4, 8), seed);
        for text in [trace.emit_text(false), trace.emit_json_lines(false)] {
            let replayed = Trace::parse(&text).unwrap();
            assert_eq!(replayed.labels, trace.labels);
            assert_eq!(build_arrows(&replayed.banks()), trace.arrows);
            for d in &trace.deltas {
                let again = replayed.delta(&d.detector, d.delta.from_addr, d.delta.to_addr).unwrap();
                assert_eq!(&again, d, "seed {seed}");
            }
        }
    }
}

#[test]
fn text_and_json_lines_carry_the_same_records() {
    for (name, text) in presets::ALL {
        let trace = run(&parse_scenario(text).unwrap(), 3);
        for debug in [false, true] {
            let from_text = Trace::parse(&trace.emit_text(debug)).unwrap();
            let from_json = Trace::parse(&trace.emit_json_lines(debug)).unwrap();
            assert_eq!(from_text, from_json, "{name}");
            assert_eq!(from_json.emit_text(debug), trace.emit_text(debug), "{name}");
            assert_eq!(from_text.emit_json_lines(debug), trace.emit_json_lines(debug), "{name}");
        }
    }
}

#[test]
fn derived_sections_hold_no_substrate_coordinates() {
    let trace = run(&parse_scenario(presets::TWO_CLOCK).unwrap(), 0);
    for line in trace.derived_text().lines() {
        let section = line.split_whitespace().next().unwrap();
        assert!(["LABEL", "DELTA", "ARROW", "TIMELINE", "FRAME"].contains(&section), "{line}");
    }
    assert!(!trace.emit_text(false).contains("EVENT"));
}

#[test]
fn two_clock_labels() {
    let trace = run(&parse_scenario(presets::TWO_CLOCK).unwrap(), 0);
    let d0 = chronode_core::NodeId::new("D0").unwrap();
    let d1 = chronode_core::NodeId::new("D1").unwrap();
    // Decays at 2 s and 7/2 s; D0 ticks every second, D1 every third.
    assert_eq!(trace.label_ticks(&d0), [2, 4]);
    assert_eq!(trace.label_ticks(&d1), [6, 11]);
    let on_d1 = trace.delta(&d1, 0, 1).unwrap();
    assert_eq!(on_d1.seconds.to_string(), "5/3");
}
