//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! sc S period=1e-24s
//! fc A lifetime=5e-24s energy=139570000eV emit=energy=139570000[eV];mass=139570000[eV/c^2]
//! fc B lifetime=exp(2/3s) energy=0eV emit=custom:hit=1[]
//! det D0 clock=S
//! link A D0 length=1.5e-15m speed=299792458
//! excite A at=0s
//! rearm none
//! budget 10000
//! ```
//!
//! Numbers may be integers, decimals, scientific or `p/q` fractions.
//! [`ScenarioSpec::emit`] writes the canonical form (fractions only), which
//! parses back to an equal spec.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ids::NodeId;
use crate::infostate::{parse_slot_list, render_slot_list, Qubit, Tag};
use crate::network::{LifetimeModel, RearmPolicy};
use crate::rational::{format_rational, parse_rational, Rational, Seconds};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ScenarioError {
    pub line: usize,
    pub column: usize,
    pub kind: ScenarioErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FcDecl {
    pub id: NodeId,
    pub lifetime: LifetimeModel,
    pub energy_ev: Rational,
    pub emit: Vec<Qubit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScDecl {
    pub id: NodeId,
    pub period: Seconds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetDecl {
    pub id: NodeId,
    pub clock: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeDecl {
    Fc(FcDecl),
    Sc(ScDecl),
    Det(DetDecl),
}

impl NodeDecl {
    pub fn id(&self) -> &NodeId {
        match self {
            NodeDecl::Fc(d) => &d.id,
            NodeDecl::Sc(d) => &d.id,
            NodeDecl::Det(d) => &d.id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDecl {
    pub src: NodeId,
    pub dst: NodeId,
    pub length_m: Rational,
    /// `None` means the speed of light.
    pub speed: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excitation {
    pub fc: NodeId,
    pub at: Seconds,
}

/// A parsed scenario. Referential integrity is checked when the network is
/// built, not here.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScenarioSpec {
    pub nodes: Vec<NodeDecl>,
    pub links: Vec<LinkDecl>,
    pub excitations: Vec<Excitation>,
    pub rearm: RearmPolicy,
    pub budget: Option<u64>,
}

impl ScenarioSpec {
    pub fn node(&self, id: &NodeId) -> Option<&NodeDecl> {
        self.nodes.iter().find(|n| n.id() == id)
    }

    /// Canonical text. `parse_scenario(&spec.emit()) == Ok(spec)`.
    pub fn emit(&self) -> String {
        self.to_string()
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.emit().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            match n {
                NodeDecl::Sc(sc) => writeln!(f, "sc {} period={}s", sc.id, sc.period)?,
                NodeDecl::Fc(fc) => {
                    let lifetime = match &fc.lifetime {
                        LifetimeModel::Deterministic(d) => format!("{d}s"),
                        LifetimeModel::Exponential(m) => format!("exp({m}s)"),
                    };
                    writeln!(
                        f,
                        "fc {} lifetime={} energy={}eV emit={}",
                        fc.id,
                        lifetime,
                        format_rational(&fc.energy_ev),
                        render_slot_list(&fc.emit)
                    )?
                }
                NodeDecl::Det(d) => writeln!(f, "det {} clock={}", d.id, d.clock)?,
            }
        }
        for l in &self.links {
            write!(f, "link {} {} length={}m", l.src, l.dst, format_rational(&l.length_m))?;
            if let Some(v) = &l.speed {
                write!(f, " speed={}", format_rational(v))?;
            }
            writeln!(f)?;
        }
        for e in &self.excitations {
            writeln!(f, "excite {} at={}s", e.fc, e.at)?;
        }
        writeln!(f, "rearm {}", self.rearm)?;
        if let Some(b) = self.budget {
            writeln!(f, "budget {b}")?;
        }
        Ok(())
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, column: usize, kind: ScenarioErrorKind) -> ScenarioError {
        ScenarioError { line: self.number, column, kind }
    }

    fn syntax(&self, column: usize, msg: impl Into<String>) -> ScenarioError {
        self.err(column, ScenarioErrorKind::Syntax(msg.into()))
    }

    fn end_column(&self) -> usize {
        self.tokens
            .last()
            .map(|t| t.column + t.text.chars().count())
            .unwrap_or(1)
    }

    fn positional(&self, index: usize, what: &str) -> Result<&Token<'a>, ScenarioError> {
        self.tokens
            .get(index)
            .ok_or_else(|| self.syntax(self.end_column(), format!("expected {what}")))
    }

    fn node_id(&self, index: usize) -> Result<NodeId, ScenarioError> {
        let tok = self.positional(index, "node id")?;
        NodeId::new(tok.text).map_err(|e| self.syntax(tok.column, e.to_string()))
    }

    /// `key=value` parameters from `start` on; every key must be in `allowed`.
    fn params(&self, start: usize, allowed: &[&str]) -> Result<BTreeMap<String, (&'a str, usize)>, ScenarioError> {
        let mut out = BTreeMap::new();
        for tok in self.tokens.iter().skip(start) {
            let (key, value) = tok
                .text
                .split_once('=')
                .ok_or_else(|| self.syntax(tok.column, format!("expected key=value, found `{}`", tok.text)))?;
            if !allowed.contains(&key) {
                return Err(self.syntax(tok.column, format!("unknown parameter `{key}`")));
            }
            let value_column = tok.column + key.len() + 1;
            if out.insert(key.to_string(), (value, value_column)).is_some() {
                return Err(self.syntax(tok.column, format!("parameter `{key}` given twice")));
            }
        }
        Ok(out)
    }

    fn required<'m>(
        &self,
        params: &'m BTreeMap<String, (&'a str, usize)>,
        key: &str,
    ) -> Result<&'m (&'a str, usize), ScenarioError> {
        params
            .get(key)
            .ok_or_else(|| self.syntax(self.end_column(), format!("missing parameter `{key}`")))
    }

    fn number(&self, text: &str, column: usize, unit: &str) -> Result<Rational, ScenarioError> {
        let body = text
            .strip_suffix(unit)
            .ok_or_else(|| self.syntax(column, format!("expected a value in `{unit}`, found `{text}`")))?;
        parse_rational(body).map_err(|e| self.syntax(column, e.to_string()))
    }

    fn expect_arity(&self, n: usize) -> Result<(), ScenarioError> {
        match self.tokens.get(n) {
            Some(extra) => Err(self.syntax(extra.column, format!("unexpected `{}`", extra.text))),
            None => Ok(()),
        }
    }
}

fn tokenize(number: usize, raw: &str) -> Line<'_> {
    let content = raw.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                tokens.push(Token {
                    text: &content[s..i],
                    column: content[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    Line { number, tokens }
}

fn positive(line: &Line<'_>, value: &Rational, column: usize, what: &str) -> Result<(), ScenarioError> {
    if *value > Rational::from_integer(0.into()) {
        Ok(())
    } else {
        Err(line.syntax(column, format!("{what} must be positive")))
    }
}

fn nonnegative(line: &Line<'_>, value: &Rational, column: usize, what: &str) -> Result<(), ScenarioError> {
    if *value >= Rational::from_integer(0.into()) {
        Ok(())
    } else {
        Err(line.syntax(column, format!("{what} must not be negative")))
    }
}

/// Parses scenario text.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let mut spec = ScenarioSpec::default();
    let mut seen: HashSet<NodeId> = HashSet::new();
    let mut rearm_seen = false;

    for (i, raw) in text.lines().enumerate() {
        let line = tokenize(i + 1, raw);
        let Some(head) = line.tokens.first() else { continue };
        let mut declare = |id: &NodeId, column: usize| -> Result<(), ScenarioError> {
            if seen.insert(id.clone()) {
                Ok(())
            } else {
                Err(line.err(column, ScenarioErrorKind::DuplicateId(id.to_string())))
            }
        };
        match head.text {
            "sc" => {
                let id = line.node_id(1)?;
                let p = line.params(2, &["period"])?;
                let (v, col) = *line.required(&p, "period")?;
                let period = line.number(v, col, "s")?;
                positive(&line, &period, col, "period")?;
                declare(&id, line.tokens[1].column)?;
                spec.nodes.push(NodeDecl::Sc(ScDecl { id, period: Seconds(period) }));
            }
            "fc" => {
                let id = line.node_id(1)?;
                let p = line.params(2, &["lifetime", "energy", "emit"])?;
                let (lt, lt_col) = *line.required(&p, "lifetime")?;
                let lifetime = match lt.strip_prefix("exp(").and_then(|s| s.strip_suffix(')')) {
                    Some(inner) => {
                        let mean = line.number(inner, lt_col + 4, "s")?;
                        positive(&line, &mean, lt_col, "mean lifetime")?;
                        LifetimeModel::Exponential(Seconds(mean))
                    }
                    None => {
                        let d = line.number(lt, lt_col, "s")?;
                        positive(&line, &d, lt_col, "lifetime")?;
                        LifetimeModel::Deterministic(Seconds(d))
                    }
                };
                let (e, e_col) = *line.required(&p, "energy")?;
                let energy_ev = line.number(e, e_col, "eV")?;
                nonnegative(&line, &energy_ev, e_col, "decay energy")?;
                let (emit, emit_col) = *line.required(&p, "emit")?;
                let emit_slots = parse_slot_list(emit).map_err(|err| line.syntax(emit_col, err.to_string()))?;
                if emit_slots.is_empty() {
                    return Err(line.syntax(emit_col, "emission template needs at least one slot"));
                }
                if emit_slots.iter().any(|q| q.tag() == &Tag::TickLabel) {
                    return Err(line.syntax(emit_col, "emission template may not carry a tick label"));
                }
                declare(&id, line.tokens[1].column)?;
                spec.nodes.push(NodeDecl::Fc(FcDecl { id, lifetime, energy_ev, emit: emit_slots }));
            }
            "det" => {
                let id = line.node_id(1)?;
                let p = line.params(2, &["clock"])?;
                let (c, col) = *line.required(&p, "clock")?;
                let clock = NodeId::new(c).map_err(|e| line.syntax(col, e.to_string()))?;
                declare(&id, line.tokens[1].column)?;
                spec.nodes.push(NodeDecl::Det(DetDecl { id, clock }));
            }
            "link" => {
                let src = line.node_id(1)?;
                let dst = line.node_id(2)?;
                let p = line.params(3, &["length", "speed"])?;
                let (l, l_col) = *line.required(&p, "length")?;
                let length_m = line.number(l, l_col, "m")?;
                nonnegative(&line, &length_m, l_col, "link length")?;
                let speed = match p.get("speed") {
                    Some(&(v, col)) => {
                        let v = parse_rational(v).map_err(|e| line.syntax(col, e.to_string()))?;
                        positive(&line, &v, col, "speed")?;
                        Some(v)
                    }
                    None => None,
                };
                spec.links.push(LinkDecl { src, dst, length_m, speed });
            }
            "excite" => {
                let fc = line.node_id(1)?;
                let p = line.params(2, &["at"])?;
                let (v, col) = *line.required(&p, "at")?;
                let at = line.number(v, col, "s")?;
                nonnegative(&line, &at, col, "excitation coordinate")?;
                spec.excitations.push(Excitation { fc, at: Seconds(at) });
            }
            "rearm" => {
                let tok = line.positional(1, "rearm policy")?;
                if rearm_seen {
                    return Err(line.syntax(head.column, "rearm given twice"));
                }
                spec.rearm = match tok.text {
                    "none" => RearmPolicy::None,
                    "on-arrival" => RearmPolicy::OnArrival,
                    other => return Err(line.syntax(tok.column, format!("unknown rearm policy `{other}`"))),
                };
                rearm_seen = true;
                line.expect_arity(2)?;
            }
            "budget" => {
                let tok = line.positional(1, "step budget")?;
                let n: u64 = tok
                    .text
                    .parse()
                    .ok()
                    .filter(|n| *n > 0)
                    .ok_or_else(|| line.syntax(tok.column, "budget must be a positive integer"))?;
                spec.budget = Some(n);
                line.expect_arity(2)?;
            }
            other => {
                return Err(line.err(head.column, ScenarioErrorKind::UnknownDirective(other.to_string())));
            }
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::node;
    use crate::presets;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn pimeson_preset_parses() {
        let spec = parse_scenario(presets::PIMESON).unwrap();
        let fcs: Vec<&FcDecl> = spec
            .nodes
            .iter()
            .filter_map(|n| match n {
                NodeDecl::Fc(f) => Some(f),
                _ => None,
            })
            .collect();
        assert_eq!(fcs.len(), 1);
        assert_eq!(fcs[0].lifetime, LifetimeModel::Deterministic(Seconds::parse("5e-24").unwrap()));
        let Some(NodeDecl::Sc(sc)) = spec.node(&node("S")) else { panic!("no clock") };
        assert_eq!(sc.period, Seconds::parse("1e-24").unwrap());
        let fc_link = spec.links.iter().find(|l| l.src == node("A")).unwrap();
        assert_eq!(fc_link.length_m, parse_rational("1.5e-15").unwrap());
    }

    #[test]
    fn empty_document_is_an_empty_spec() {
        assert_eq!(parse_scenario("").unwrap(), ScenarioSpec::default());
        assert_eq!(parse_scenario("# nothing\n\n   \n").unwrap(), ScenarioSpec::default());
    }

    #[test]
    fn duplicate_id_reports_position() {
        let text = "sc S period=1s\nfc A lifetime=1s energy=0eV emit=energy=1[eV]\nfc A lifetime=2s energy=0eV emit=energy=1[eV]\n";
        let err = parse_scenario(text).unwrap_err();
        assert_eq!(err.kind, ScenarioErrorKind::DuplicateId("A".into()));
        assert_eq!((err.line, err.column), (3, 4));
    }

    #[test]
    fn unknown_directive() {
        let err = parse_scenario("sc S period=1s\n  warp A\n").unwrap_err();
        assert_eq!(err.kind, ScenarioErrorKind::UnknownDirective("warp".into()));
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let err = parse_scenario("sc S period=-1s").unwrap_err();
        assert!(matches!(err.kind, ScenarioErrorKind::Syntax(_)));
        assert_eq!(err.column, 13);
        let err = parse_scenario("sc S period=1").unwrap_err();
        assert!(matches!(err.kind, ScenarioErrorKind::Syntax(_)));
        let err = parse_scenario("link A B").unwrap_err();
        assert!(matches!(err.kind, ScenarioErrorKind::Syntax(_)));
        let err = parse_scenario("fc A lifetime=1s energy=0eV emit=tick=1[tick]").unwrap_err();
        assert!(matches!(err.kind, ScenarioErrorKind::Syntax(_)));
        let err = parse_scenario("rearm sometimes").unwrap_err();
        assert_eq!(err.column, 7);
        let err = parse_scenario("sc S period=1s period=2s").unwrap_err();
        assert_eq!(err.column, 16);
    }

    #[test]
    fn comments_and_every_number_form() {
        let text = "\
sc S period=1/3s   # a third
fc A lifetime=exp(2.5e-1s) energy=0.5eV emit=momentum=-3/4[eV/c];custom:in.p=1[]
det D clock=S
link A D length=0m speed=1e3
excite A at=2s
rearm on-arrival
budget 50
";
        let spec = parse_scenario(text).unwrap();
        let Some(NodeDecl::Fc(fc)) = spec.node(&node("A")) else { panic!() };
        assert_eq!(fc.lifetime, LifetimeModel::Exponential(Seconds(ratio(1, 4))));
        assert_eq!(fc.energy_ev, ratio(1, 2));
        assert_eq!(fc.emit[0].value(), &ratio(-3, 4));
        assert_eq!(spec.links[0].speed, Some(int(1000)));
        assert_eq!(spec.rearm, RearmPolicy::OnArrival);
        assert_eq!(spec.budget, Some(50));
        assert_eq!(parse_scenario(&spec.emit()).unwrap(), spec);
    }

    #[test]
    fn digest_is_stable_hex() {
        let spec = parse_scenario(presets::PIMESON).unwrap();
        let d = spec.digest();
        assert_eq!(d.len(), 16);
        assert!(d.chars().all(|c| c.is_ascii_hexdigit()));
        assert_eq!(d, parse_scenario(&spec.emit()).unwrap().digest());
    }

    fn arb_rational(lo: i64) -> impl Strategy<Value = Rational> {
        (lo..1_000_000i64, 1i64..10_000).prop_map(|(n, d)| ratio(n, d))
    }

    fn arb_spec() -> impl Strategy<Value = ScenarioSpec> {
        let ids = prop::collection::btree_set("[A-Z][a-z0-9]{0,2}", 2..8);
        (
            ids,
            prop::collection::vec((arb_rational(1), arb_rational(0), any::<bool>(), -50i64..50), 8),
            prop::collection::vec((0usize..8, 0usize..8, arb_rational(0), prop::option::of(arb_rational(1))), 0..6),
            prop::collection::vec((0usize..8, arb_rational(0)), 0..4),
            any::<bool>(),
            prop::option::of(1u64..100_000),
        )
            .prop_map(|(ids, params, links, excites, rearm, budget)| {
                let ids: Vec<NodeId> = ids.into_iter().map(|s| node(&s)).collect();
                let n = ids.len();
                let mut spec = ScenarioSpec {
                    rearm: if rearm { RearmPolicy::OnArrival } else { RearmPolicy::None },
                    budget,
                    ..Default::default()
                };
                for (i, id) in ids.iter().enumerate() {
                    let (a, b, flag, m) = &params[i];
                    spec.nodes.push(match i % 3 {
                        0 => NodeDecl::Sc(ScDecl { id: id.clone(), period: Seconds(a.clone()) }),
                        1 => NodeDecl::Fc(FcDecl {
                            id: id.clone(),
                            lifetime: if *flag {
                                LifetimeModel::Exponential(Seconds(a.clone()))
                            } else {
                                LifetimeModel::Deterministic(Seconds(a.clone()))
                            },
                            energy_ev: b.clone(),
                            emit: vec![
                                Qubit::new(Tag::Momentum, int(*m), "eV/c").unwrap(),
                                Qubit::new(Tag::custom("out.n"), b.clone(), "").unwrap(),
                            ],
                        }),
                        _ => NodeDecl::Det(DetDecl { id: id.clone(), clock: ids[0].clone() }),
                    });
                }
                for (s, d, len, speed) in links {
                    spec.links.push(LinkDecl {
                        src: ids[s % n].clone(),
                        dst: ids[d % n].clone(),
                        length_m: len,
                        speed,
                    });
                }
                for (f, at) in excites {
                    spec.excitations.push(Excitation { fc: ids[f % n].clone(), at: Seconds(at) });
                }
                spec
            })
    }

    proptest! {
        #[test]
        fn emit_parse_roundtrip(spec in arb_spec()) {
            prop_assert_eq!(parse_scenario(&spec.emit()).unwrap(), spec);
        }
    }
}
