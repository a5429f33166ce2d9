//! Seeded generators for randomized scenarios.
//!
//! Every quantity is a small-denominator rational and links carry an
//! explicit unit speed, so transits are exact and coincidences common.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::ids::NodeId;
use crate::infostate::{Qubit, Tag};
use crate::network::{LifetimeModel, RearmPolicy};
use crate::rational::{int, ratio, Rational, Seconds};
use crate::scenario::{DetDecl, Excitation, FcDecl, LinkDecl, NodeDecl, ScDecl, ScenarioSpec};

struct Draw(ChaCha8Rng);

impl Draw {
    fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// `p/q` with `p` in `lo..=hi` and `q` in `1..=max_den`.
    fn rational(&mut self, lo: u64, hi: u64, max_den: u64) -> Rational {
        let p = self.range(lo, hi) as i64;
        let q = self.range(1, max_den) as i64;
        ratio(p, q)
    }

    fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

fn id(prefix: &str, i: usize) -> NodeId {
    NodeId::new(format!("{prefix}{i}")).expect("generated ids are valid")
}

fn template(draw: &mut Draw, i: usize) -> Vec<Qubit> {
    let mut slots = vec![Qubit::new(Tag::Energy, int(draw.range(1, 9) as i64), "eV").expect("valid slot")];
    if draw.chance(1, 2) {
        let p = int(draw.range(0, 6) as i64 - 3);
        slots.push(Qubit::new(Tag::Momentum, p, "eV/c").expect("valid slot"));
    }
    let side = if draw.chance(1, 2) { "in" } else { "out" };
    slots.push(Qubit::new(Tag::custom(&format!("{side}.p{i}")), int(1), "").expect("valid slot"));
    slots
}

/// A random terminating scenario of `min_nodes..=max_nodes` nodes (at least
/// four): one or two standard clocks, one or two detectors, the rest
/// Feynman clocks. No re-arming, so every clock decays at most once.
pub fn random_scenario(seed: u64, min_nodes: usize, max_nodes: usize) -> ScenarioSpec {
    assert!(4 <= min_nodes && min_nodes <= max_nodes);
    let mut draw = Draw(ChaCha8Rng::seed_from_u64(seed));
    let total = draw.range(min_nodes as u64, max_nodes as u64) as usize;
    let n_sc = if total >= 6 && draw.chance(1, 2) { 2 } else { 1 };
    let n_det = if draw.chance(1, 2) { 2 } else { 1 };
    let n_fc = total - n_sc - n_det;

    let scs: Vec<NodeId> = (0..n_sc).map(|i| id("S", i)).collect();
    let fcs: Vec<NodeId> = (0..n_fc).map(|i| id("F", i)).collect();
    let dets: Vec<NodeId> = (0..n_det).map(|i| id("D", i)).collect();

    let mut spec = ScenarioSpec { rearm: RearmPolicy::None, ..ScenarioSpec::default() };
    for sc in &scs {
        let period = Seconds(draw.rational(1, 3, 4));
        spec.nodes.push(NodeDecl::Sc(ScDecl { id: sc.clone(), period }));
    }
    for (i, fc) in fcs.iter().enumerate() {
        let mean = Seconds(draw.rational(1, 12, 4));
        let lifetime = if draw.chance(1, 4) {
            LifetimeModel::Exponential(mean)
        } else {
            LifetimeModel::Deterministic(mean)
        };
        spec.nodes.push(NodeDecl::Fc(FcDecl {
            id: fc.clone(),
            lifetime,
            energy_ev: int(draw.range(0, 9) as i64),
            emit: template(&mut draw, i),
        }));
    }
    let mut clock_of = Vec::new();
    for det in &dets {
        let clock = draw.pick(&scs).clone();
        clock_of.push((det.clone(), clock.clone()));
        spec.nodes.push(NodeDecl::Det(DetDecl { id: det.clone(), clock }));
    }

    let link = |draw: &mut Draw, src: &NodeId, dst: &NodeId| LinkDecl {
        src: src.clone(),
        dst: dst.clone(),
        length_m: draw.rational(0, 6, 3),
        speed: Some(int(1)),
    };
    for fc in &fcs {
        for det in &dets {
            if draw.chance(2, 3) {
                let l = link(&mut draw, fc, det);
                spec.links.push(l);
            }
        }
        for other in &fcs {
            if other != fc && draw.chance(1, 4) {
                let l = link(&mut draw, fc, other);
                spec.links.push(l);
            }
        }
    }
    for (det, clock) in &clock_of {
        if draw.chance(1, 3) {
            let l = link(&mut draw, clock, det);
            spec.links.push(l);
        }
    }

    for fc in &fcs {
        if draw.chance(1, 2) {
            spec.excitations.push(Excitation { fc: fc.clone(), at: Seconds(draw.rational(0, 4, 2)) });
        }
    }
    if spec.excitations.is_empty() {
        spec.excitations.push(Excitation { fc: fcs[0].clone(), at: Seconds::zero() });
    }
    spec
}

/// The same scenario with nodes, links and excitations declared in a
/// seeded random order.
pub fn shuffle_declarations(spec: &ScenarioSpec, seed: u64) -> ScenarioSpec {
    fn shuffle<T>(draw: &mut Draw, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = draw.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
    let mut draw = Draw(ChaCha8Rng::seed_from_u64(seed));
    let mut out = spec.clone();
    shuffle(&mut draw, &mut out.nodes);
    shuffle(&mut draw, &mut out.links);
    shuffle(&mut draw, &mut out.excitations);
    out
}

/// One clock, one detector and one deterministic Feynman clock excited at
/// tick `k`, all colocated.
pub fn quantization_scenario(lifetime: &Seconds, period: &Seconds, k: u64) -> ScenarioSpec {
    let (sc, fc, det) = (id("S", 0), id("F", 0), id("D", 0));
    ScenarioSpec {
        nodes: vec![
            NodeDecl::Sc(ScDecl { id: sc.clone(), period: period.clone() }),
            NodeDecl::Fc(FcDecl {
                id: fc.clone(),
                lifetime: LifetimeModel::Deterministic(lifetime.clone()),
                energy_ev: int(1),
                emit: vec![Qubit::new(Tag::Energy, int(1), "eV").expect("valid slot")],
            }),
            NodeDecl::Det(DetDecl { id: det.clone(), clock: sc }),
        ],
        links: vec![LinkDecl { src: fc.clone(), dst: det, length_m: int(0), speed: None }],
        excitations: vec![Excitation { fc, at: period * &Rational::from_integer(k.into()) }],
        rearm: RearmPolicy::None,
        budget: None,
    }
}

/// A random `(lifetime, period)` pair of positive rationals.
pub fn random_lifetime_period(seed: u64) -> (Seconds, Seconds) {
    let mut draw = Draw(ChaCha8Rng::seed_from_u64(seed));
    let lifetime = Seconds(draw.rational(1, 1000, 97));
    let period = Seconds(draw.rational(1, 50, 13));
    (lifetime, period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_network;
    use crate::scenario::parse_scenario;

    #[test]
    fn generated_scenarios_build_and_roundtrip() {
        for seed in 0..200 {
            let spec = random_scenario(seed, 4, 8);
            assert!((4..=8).contains(&spec.nodes.len()));
            build_network(&spec, seed).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(parse_scenario(&spec.emit()).unwrap(), spec);
        }
    }

    #[test]
    fn generation_is_seeded() {
        assert_eq!(random_scenario(5, 4, 8), random_scenario(5, 4, 8));
        assert_eq!(random_lifetime_period(5), random_lifetime_period(5));
    }

    #[test]
    fn shuffle_keeps_content() {
        let spec = random_scenario(11, 8, 8);
        let shuffled = shuffle_declarations(&spec, 3);
        let mut a: Vec<String> = spec.emit().lines().map(String::from).collect();
        let mut b: Vec<String> = shuffled.emit().lines().map(String::from).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn quantization_scenario_builds() {
        let spec = quantization_scenario(&Seconds(ratio(7, 3)), &Seconds(ratio(1, 2)), 4);
        assert_eq!(spec.excitations[0].at, Seconds(int(2)));
        build_network(&spec, 0).unwrap();
    }
}
