//! `failsafe` — fail-safe number analysis from the command line.
//!
//! Subcommands: `compute` (report from a study table), `dist` (exact
//! estimator distributions), `simulate` (seeded Monte Carlo experiments
//! with plot-ready output) and `converge` (error-vs-k sweep with a log-log
//! fit). Every command is a pure function of its arguments, input files and
//! seed; re-runs emit byte-identical payloads.
//!
//! Exit codes: 0 success, 1 computation or I/O failure, 2 usage error.

mod commands;
mod output;
mod table;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

/// Documented default seed; override with `--seed` or `FAILSAFE_SEED`.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "failsafe",
    version,
    about = "Rosenthal fail-safe number analysis and the distribution of its estimator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fail-safe number report for a CSV study table
    Compute(ComputeArgs),
    /// Exact distribution of the estimator: pdf, cdf, moments, cf
    Dist {
        #[command(subcommand)]
        which: DistCommand,
    },
    /// Seeded Monte Carlo experiments with plot-ready output
    Simulate {
        #[command(subcommand)]
        which: SimCommand,
    },
    /// Convergence-rate sweep over k and log-log least-squares fit
    Converge(ConvergeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum ApproachArg {
    Truncated,
    Folded,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum RegimeArg {
    Truncated,
    Folded,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum TruthArg {
    Folded,
    Truncated,
}

/// Inclusive grid `LO:HI:N` with N evaluation points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.lo + step * i as f64).collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid must be LO:HI:N, got `{s}`"));
        }
        let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid lower bound `{}`", parts[0]))?;
        let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid upper bound `{}`", parts[1]))?;
        let n: usize = parts[2].parse().map_err(|_| format!("bad grid count `{}`", parts[2]))?;
        if n == 0 {
            return Err("grid needs at least one point".into());
        }
        if n > 1 && hi <= lo {
            return Err(format!("grid needs hi > lo, got {lo}..{hi}"));
        }
        Ok(GridSpec { lo, hi, n })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.n)
    }
}

#[derive(Args)]
pub struct ComputeArgs {
    /// CSV study table with header `z` or `effect,se` (optional label column)
    pub file: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output path; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DistArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = ApproachArg::Both)]
    pub approach: ApproachArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum DistCommand {
    /// Density over a grid of estimator values
    Pdf {
        #[command(flatten)]
        common: DistArgs,
        /// Evaluation grid LO:HI:N
        #[arg(long)]
        grid: GridSpec,
        /// Large-k form with the truncation normalizer dropped
        #[arg(long)]
        asymptotic: bool,
    },
    /// Distribution function over a grid
    Cdf {
        #[command(flatten)]
        common: DistArgs,
        #[arg(long)]
        grid: GridSpec,
    },
    /// Closed-form mean, variance and truncation corrections
    Moments {
        #[command(flatten)]
        common: DistArgs,
    },
    /// Characteristic function at one frequency or over a grid
    Cf {
        #[command(flatten)]
        common: DistArgs,
        /// Single frequency t
        #[arg(long)]
        t: Option<f64>,
        /// Frequency grid LO:HI:N (alternative to --t)
        #[arg(long)]
        grid: Option<GridSpec>,
    },
}

#[derive(Args)]
pub struct CltArgs {
    /// Studies per sum
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,
    /// Seed; defaults to FAILSAFE_SEED or the built-in constant
    #[arg(long)]
    pub seed: Option<u64>,
    /// Histogram bin count; Freedman–Diaconis when omitted
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct NrArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum SimCommand {
    /// Half-normal sums against their limiting normal
    Clt(CltArgs),
    /// Estimator draws with both exact density overlays and a KS report
    Nr(NrArgs),
}

#[derive(Args)]
pub struct ConvergeArgs {
    #[arg(long, default_value_t = 10)]
    pub kmin: usize,
    /// Largest k; defaults to 1000 (5000 with --full-scale)
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub step: usize,
    /// Simulations per k; defaults to 2000 (10000 with --full-scale)
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Which closed-form mean serves as the true value
    #[arg(long, value_enum, default_value_t = TruthArg::Folded)]
    pub truth: TruthArg,
    /// Full-scale grid: k up to 5000 at 10^4 reps (long run)
    #[arg(long)]
    pub full_scale: bool,
    /// Per-k records CSV; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fit JSON; stdout when omitted
    #[arg(long)]
    pub fit_out: Option<PathBuf>,
}

/// Error class that should exit with the usage code.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

/// Seed resolution: flag wins over the FAILSAFE_SEED variable, which wins
/// over the built-in default.
pub fn resolve_seed(flag: Option<u64>) -> anyhow::Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("FAILSAFE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("FAILSAFE_SEED must be a u64, got `{v}`")).into()),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Compute(args) => commands::compute(args),
        Command::Dist { which } => commands::dist(which),
        Command::Simulate { which } => commands::simulate(which),
        Command::Converge(args) => commands::converge(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
