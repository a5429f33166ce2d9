//! Workloads shared by the engine benchmarks.

use chronode_core::synth::random_scenario;
use chronode_core::{build_network, parse_scenario, ScenarioSpec, Trace};

/// A fan-in scenario: `n` Feynman clocks with staggered lifetimes, all
/// linked to one detector.
pub fn fan_in(n: usize) -> ScenarioSpec {
    let mut text = String::from("sc S period=1s\ndet D0 clock=S\n");
    for i in 0..n {
        text.push_str(&format!(
            "fc F{i} lifetime={}/7s energy=1eV emit=energy=1[eV]\nlink F{i} D0 length=0m\nexcite F{i} at=0s\n",
            i + 1
        ));
    }
    parse_scenario(&text).expect("generated scenario parses")
}

/// `count` random eight-node scenarios.
pub fn random_batch(count: u64) -> Vec<ScenarioSpec> {
    (0..count).map(|seed| random_scenario(seed, 8, 8)).collect()
}

/// Runs a scenario to quiescence with a generous budget.
pub fn run(spec: &ScenarioSpec, seed: u64) -> Trace {
    build_network(spec, seed)
        .expect("benchmark scenarios build")
        .run_until_quiescent(1_000_000)
        .expect("benchmark scenarios run")
}
