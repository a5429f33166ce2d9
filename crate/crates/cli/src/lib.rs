//! Subcommand implementations. Each takes document text and returns the
//! text to print, leaving file access and exit codes to the binary.

use anyhow::{bail, Context, Result};

use chronode_core::observer::parse_tick_stream;
use chronode_core::trace::Termination;
use chronode_core::{build_network, parse_rational, parse_scenario, perceive, NodeId, Trace, TraceFormat};

/// Step budget when neither the scenario nor the command line gives one.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub max_steps: Option<u64>,
    pub format: TraceFormat,
    pub debug_substrate: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: String,
    pub termination: Termination,
}

pub fn cmd_run(scenario: &str, opts: &RunOptions) -> Result<RunOutput> {
    let spec = parse_scenario(scenario).context("invalid scenario")?;
    let mut engine = build_network(&spec, opts.seed).context("cannot build network")?;
    let budget = opts.max_steps.or(spec.budget).unwrap_or(DEFAULT_MAX_STEPS);
    let trace = engine.run_until_quiescent(budget)?;
    Ok(RunOutput {
        trace: trace.emit(opts.format, opts.debug_substrate),
        termination: trace.footer.termination,
    })
}

fn parse_trace(text: &str) -> Result<Trace> {
    Trace::parse(text).context("invalid trace")
}

fn node_id(text: &str) -> Result<NodeId> {
    NodeId::new(text).with_context(|| format!("invalid node id `{text}`"))
}

/// Recomputes the label difference between two addresses of a detector.
pub fn cmd_delta(trace: &str, detector: &str, from: u64, to: u64) -> Result<String> {
    let trace = parse_trace(trace)?;
    let d = trace.delta(&node_id(detector)?, from, to)?;
    Ok(format!(
        "DELTA {} {} {} {} {} {} {}\n",
        d.detector,
        d.delta.from_addr,
        d.delta.to_addr,
        d.delta.signed_ticks,
        d.delta.magnitude_ticks,
        d.delta.orientation,
        d.seconds
    ))
}

/// Arrow and timeline sections, rebuilt from the trace's labels.
pub fn cmd_arrows(trace: &str) -> Result<String> {
    let trace = parse_trace(trace)?.rederived();
    let mut out = String::new();
    for line in trace.emit_text(false).lines() {
        if line.starts_with("ARROW ") || line.starts_with("TIMELINE ") {
            out.push_str(line);
            out.push('\n');
        }
    }
    Ok(out)
}

/// Where the observer's pulse train comes from.
#[derive(Debug, Clone)]
pub enum Stream<'a> {
    /// `a..b` or a comma list of ticks.
    Spec(&'a str),
    /// Label ticks of one detector in a trace; the detector may be omitted
    /// when the trace has exactly one.
    Trace { text: &'a str, detector: Option<&'a str> },
}

pub fn cmd_subjective(stream: Stream<'_>, width: &str, reference: u64) -> Result<String> {
    let width = parse_rational(width).with_context(|| format!("invalid cycle width `{width}`"))?;
    let ticks = match stream {
        Stream::Spec(spec) => parse_tick_stream(spec).with_context(|| format!("invalid tick stream `{spec}`"))?,
        Stream::Trace { text, detector } => {
            let trace = parse_trace(text)?;
            let detector = match detector {
                Some(d) => node_id(d)?,
                None => {
                    let banks = trace.banks();
                    let mut ids = banks.keys();
                    match (ids.next(), ids.next()) {
                        (Some(only), None) => only.clone(),
                        (None, _) => bail!("trace has no labeled records"),
                        _ => bail!("trace has several detectors; choose one with --detector"),
                    }
                }
            };
            let ticks = trace.label_ticks(&detector);
            if ticks.is_empty() {
                bail!("detector `{detector}` has no records in this trace");
            }
            ticks
        }
    };
    let frames = perceive(&ticks, &width, reference)?;
    Ok(frames.iter().map(|f| format!("{f}\n")).collect())
}
