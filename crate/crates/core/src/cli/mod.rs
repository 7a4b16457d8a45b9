//! Command-line front end: `exact`, `asym`, `simulate`, `compare`, `graph`
//! and `selfcheck`.
//!
//! Exit codes: 0 success, 2 domain or precondition error, 3 a `compare`
//! z-score over threshold, 4 an internal consistency failure, 1 anything else.

mod campaign;
mod commands;
mod grid;
mod quantity;
mod sampling;
mod selfcheck;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::graph::Discipline;

pub use grid::{Count, FloatGrid, IntGrid};
pub use quantity::{asymptotic_value, exact_value, Quantity, Variable};
pub use table::{format_float, Cell, Format, Metadata, Table};

#[derive(Debug, Parser, Serialize)]
#[command(name = "queuegraph", version, about = "M/M/1 busy periods, ranked-server search and interval graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact laws and moments.
    Exact(ExactArgs),
    /// Asymptotic approximations.
    Asym(AsymArgs),
    /// Monte Carlo estimates against the exact values.
    Simulate(SimulateArgs),
    /// Exact, asymptotic and simulated values side by side.
    Compare(CompareArgs),
    /// Interval graph of one busy period.
    Graph(GraphArgs),
    /// Run the built-in consistency checks.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactQuantity {
    /// Pr[N = n]; needs --n.
    NPmf,
    /// Ex[N^m]; needs --m.
    NMoment,
    /// Ex[N (N-1) ... (N-m+1)]; needs --m.
    NFactorialMoment,
    /// Pr[K > k]; needs --k.
    KTail,
    /// Pr[K = k]; needs --k.
    KPmf,
    /// Ex[K^m]; needs --m.
    KMoment,
    /// Pr[L > l]; needs --l.
    LTail,
    /// Ex[L^m]; needs --m.
    LMoment,
    /// Pr[I > i]; needs --i.
    ITail,
    /// Ex[I^m]; needs --m.
    IMoment,
    /// Lambert series T_l; needs --l.
    LambertT,
    /// Gambler's ruin probability; needs --p, --v, --w.
    Ruin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentRoute {
    #[default]
    Lambert,
    Direct,
}

#[derive(Debug, Args, Serialize)]
pub struct ExactArgs {
    #[arg(value_enum)]
    pub quantity: ExactQuantity,
    #[arg(long)]
    pub lambda: Option<FloatGrid>,
    #[arg(long)]
    pub n: Option<IntGrid>,
    #[arg(long)]
    pub k: Option<IntGrid>,
    #[arg(long)]
    pub l: Option<IntGrid>,
    #[arg(long)]
    pub i: Option<IntGrid>,
    #[arg(long)]
    pub m: Option<IntGrid>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub v: Option<Count>,
    #[arg(long)]
    pub w: Option<Count>,
    /// Relative tolerance for infinite sums.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Evaluation route for k-moment.
    #[arg(long, value_enum, default_value_t)]
    pub method: MomentRoute,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AsymQuantity {
    /// log(1/(1-λ)) + γ.
    KMean,
    /// Ex[K^m] keeping the non-vanishing terms; needs --m.
    KMoment,
    /// Leading term of Ex[K^m]; needs --m.
    KLeading,
    /// Var[K].
    KVar,
    /// Ex[K^m] from the T_l expansions truncated at --order; needs --m.
    KFromT,
    /// Leading term of Ex[N^m]; needs --m.
    NMoment,
    /// λ/2 + log(λ)/2.
    LMean,
    /// Ex[L^m] for large λ; needs --m.
    LMoment,
    /// Normal approximation to Pr[L > l] in the body; needs --l.
    LBodyTail,
    /// Expansion of T_l in h = -log λ; needs --l.
    T,
    /// Expansion of 1/h in 1-λ.
    InvH,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymArgs {
    #[arg(value_enum)]
    pub quantity: AsymQuantity,
    #[arg(long)]
    pub lambda: FloatGrid,
    #[arg(long)]
    pub l: Option<IntGrid>,
    #[arg(long)]
    pub m: Option<IntGrid>,
    /// Number of series terms kept.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    /// Independent M/M/1 busy periods: N and K.
    Mm1,
    /// Ordered waiting stations in equilibrium: I.
    Stations,
    /// Ranked M/M/∞ servers in equilibrium: L.
    Ranked,
    /// Gambler's ruin walks.
    Ruin,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub process: Process,
    #[arg(long, required = true)]
    pub seed: u64,
    #[arg(long)]
    pub lambda: Option<FloatGrid>,
    /// Busy periods per λ (mm1).
    #[arg(long, default_value = "1e5")]
    pub periods: Count,
    /// Recorded arrivals per λ, after the warmup (stations, ranked).
    #[arg(long, default_value = "1e5")]
    pub arrivals: Count,
    /// Discarded arrivals; defaults to a λ-dependent burn-in.
    #[arg(long)]
    pub warmup: Option<Count>,
    /// Moment orders.
    #[arg(long, default_value = "1,2")]
    pub m: IntGrid,
    /// Tail points for K (mm1).
    #[arg(long, default_value = "0..10")]
    pub k: IntGrid,
    /// Tail points for I (stations).
    #[arg(long, default_value = "0..15")]
    pub i: IntGrid,
    /// Tail points for L (ranked); defaults to 0..λ+4√λ.
    #[arg(long)]
    pub l: Option<IntGrid>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub v: Option<Count>,
    #[arg(long)]
    pub w: Option<Count>,
    #[arg(long, default_value = "1e6")]
    pub walks: Count,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Write the raw samples (one per line) to this file; single λ only.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EngineArgs {
    /// Batches for equilibrium standard errors.
    #[arg(long, default_value_t = crate::simulation::DEFAULT_BATCHES)]
    pub batches: usize,
    /// Random streams the busy periods are split over.
    #[arg(long, default_value_t = 16)]
    pub chunks: u64,
    /// Events allowed per run (per chunk for mm1).
    #[arg(long, default_value = "1e8")]
    pub event_cap: Count,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// Comma list such as K^1,N^2,I>3.
    #[arg(long, value_delimiter = ',', required = true)]
    pub quantities: Vec<Quantity>,
    #[arg(long)]
    pub lambda: FloatGrid,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "1e5")]
    pub periods: Count,
    #[arg(long, default_value = "1e5")]
    pub arrivals: Count,
    #[arg(long)]
    pub warmup: Option<Count>,
    /// Largest |z| accepted before exiting with status 3.
    #[arg(long, default_value_t = 4.0)]
    pub threshold: f64,
    /// Skip simulation; z-scores are left empty.
    #[arg(long)]
    pub no_sim: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    /// Sorted `u v` lines after a `#` header.
    #[default]
    Edges,
    Dot,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct GraphArgs {
    /// Busy period as A/D letters, e.g. AAADADADADDD.
    #[arg(long, conflicts_with_all = ["lambda", "seed"])]
    pub trace: Option<String>,
    /// Generate the busy period at this rate instead.
    #[arg(long, requires = "seed")]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "fcfs")]
    pub discipline: Discipline,
    #[arg(long, value_enum, default_value_t)]
    pub format: GraphFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ValueEnum for Discipline {
    fn value_variants<'a>() -> &'a [Self] {
        &Discipline::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Discipline::Fcfs => "fcfs",
            Discipline::Lcfs => "lcfs",
            Discipline::OrderedStation => "ordered-station",
        }))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SelfcheckArgs {
    #[arg(long, default_value_t = 20240611)]
    pub seed: u64,
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some `compare` z-score exceeded the threshold.
    ThresholdExceeded,
    /// Some `selfcheck` property failed.
    ChecksFailed,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Engine(Error::Domain(_) | Error::MalformedTrace(_)) => 2,
            CliError::Engine(Error::Internal(_)) => 4,
            _ => 1,
        }
    }
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::ThresholdExceeded => 3,
            Outcome::ChecksFailed => 4,
        }
    }
}

/// Output sink: the `--out` file if given, else `stdout`.
pub(crate) fn with_sink<T>(
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> io::Result<T>,
) -> io::Result<T> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            let r = f(&mut w)?;
            w.flush()?;
            Ok(r)
        }
        None => f(stdout),
    }
}

pub(crate) fn emit(
    table: &Table,
    meta: &Metadata,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    with_sink(&output.out, stdout, |w| table.write(meta, output.format, w))?;
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Exact(a) => commands::exact(a, stdout),
        Command::Asym(a) => commands::asym(a, stdout),
        Command::Graph(a) => commands::graph(a, stdout),
        Command::Simulate(a) => campaign::simulate(a, stdout),
        Command::Compare(a) => campaign::compare(a, stdout),
        Command::Selfcheck(a) => selfcheck::selfcheck(a, stdout),
    }
}

/// Parse the process arguments, run, and map the result to an exit status.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
