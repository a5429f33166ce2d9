use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use chronode_cli::{cmd_arrows, cmd_delta, cmd_run, cmd_subjective, RunOptions, Stream};
use chronode_core::trace::Termination;
use chronode_core::TraceFormat;

/// Deterministic causal-network simulator where elapsed time is a computed
/// output.
#[derive(Debug, Parser)]
#[command(name = "chronode", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    JsonLines,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its trace. Exits 0 when the network goes
    /// quiescent and 2 when the step budget runs out first.
    Run {
        /// Scenario file.
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Step budget; overrides the scenario's `budget` directive.
        #[arg(long)]
        max_steps: Option<u64>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Include the substrate event log (diagnostic only).
        #[arg(long)]
        debug_substrate: bool,
    },
    /// Elapsed time between two records of one detector.
    Delta {
        trace: PathBuf,
        #[arg(long)]
        detector: String,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Arrows of time and timelines rebuilt from a trace.
    Arrows { trace: PathBuf },
    /// Attention frames over a pulse train.
    Subjective {
        /// Trace whose label ticks form the pulse train.
        #[arg(required_unless_present = "stream", conflicts_with = "stream")]
        trace: Option<PathBuf>,
        /// Explicit pulse train: `a..b` or a comma list.
        #[arg(long)]
        stream: Option<String>,
        /// Detector to read from the trace.
        #[arg(long, requires = "trace")]
        detector: Option<String>,
        /// Cycle width in ticks (rational).
        #[arg(long)]
        width: String,
        /// Pulse count of a normal cycle.
        #[arg(long)]
        reference: u64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { scenario, seed, max_steps, trace, format, debug_substrate } => {
            let format = match format {
                Format::Text => TraceFormat::Text,
                Format::JsonLines => TraceFormat::JsonLines,
            };
            let opts = RunOptions { seed, max_steps, format, debug_substrate };
            let out = cmd_run(&read(&scenario)?, &opts)?;
            match trace {
                Some(path) => fs::write(&path, &out.trace).with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{}", out.trace),
            }
            Ok(match out.termination {
                Termination::Quiescent => ExitCode::SUCCESS,
                Termination::BudgetExhausted => ExitCode::from(2),
            })
        }
        Command::Delta { trace, detector, from, to } => {
            print!("{}", cmd_delta(&read(&trace)?, &detector, from, to)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Arrows { trace } => {
            print!("{}", cmd_arrows(&read(&trace)?)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Subjective { trace, stream, detector, width, reference } => {
            let text;
            let source = match (&stream, &trace) {
                (Some(spec), _) => Stream::Spec(spec),
                (None, Some(path)) => {
                    text = read(path)?;
                    Stream::Trace { text: &text, detector: detector.as_deref() }
                }
                (None, None) => unreachable!("clap requires a trace or a stream"),
            };
            print!("{}", cmd_subjective(source, &width, reference)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("chronode: {err:#}");
            ExitCode::FAILURE
        }
    }
}
