use crate::error::{CliError, CliResult};
use crate::experiment::{alpha_range, noise_range, Range, SearchConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rbn_core::{GridIncrement, StateFamily};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rbn", version, about = "Realism-based nonlocality of three-qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print η and its entropies for one state and setting.
    Eval(EvalArgs),
    /// N₃ of a noisy GHZ or W state across noise weights.
    SweepNoise(SweepArgs),
    /// Monogamy witness over a noise × alpha grid.
    Monogamy(MonogamyArgs),
    /// Run the invariant checks at reduced scale.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Chi {
    Ghz,
    W,
}

impl From<Chi> for StateFamily {
    fn from(c: Chi) -> Self {
        match c {
            Chi::Ghz => StateFamily::Ghz,
            Chi::W => StateFamily::W,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// ghz, w, ghz(n), w(n), mixed(n), zero or schmidt(p1,p2).
    #[arg(long)]
    pub state: String,
    /// Three directions, each x, y, z, -x, … or theta:phi in units of π.
    #[arg(long)]
    pub setting: String,
    /// Site whose realism is probed.
    #[arg(long, value_enum, default_value = "a")]
    pub target: Target,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Grid increment: pi/8, pi/4, pi/2 or another divisor of π.
    #[arg(long, default_value = "pi/8")]
    pub increment: String,
    /// Sample this many random settings instead of the grid.
    #[arg(long, value_name = "N", conflicts_with = "dedupe")]
    pub random: Option<usize>,
    /// Seed for --random.
    #[arg(long, value_name = "S", requires = "random")]
    pub seed: Option<u64>,
    /// Drop grid directions that repeat an observable.
    #[arg(long)]
    pub dedupe: bool,
    /// Optimize only A|BC after checking the state is permutation symmetric.
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long, value_name = "K", env = "RBN_WORKERS")]
    pub workers: Option<usize>,
}

impl SearchArgs {
    pub fn config(&self) -> CliResult<SearchConfig> {
        let increment: GridIncrement = self.increment.parse()?;
        if self.random == Some(0) {
            return Err(CliError::Usage("--random needs a positive count".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        Ok(SearchConfig {
            increment,
            random: self.random.map(|n| (n, self.seed.unwrap_or(0))),
            dedupe: self.dedupe,
            symmetric: self.symmetric,
            workers: self.workers,
        })
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Record per-row wall time (makes output run-dependent).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long, value_enum)]
    pub chi: Chi,
    #[arg(long, default_value_t = 0.0)]
    pub noise_start: f64,
    #[arg(long, default_value_t = 1.0)]
    pub noise_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub noise_step: f64,
}

impl NoiseArgs {
    pub fn range(&self) -> CliResult<Range> {
        noise_range(self.noise_start, self.noise_end, self.noise_step)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MonogamyArgs {
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, default_value_t = 0.01)]
    pub alpha_start: f64,
    #[arg(long, default_value_t = 10.0)]
    pub alpha_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub alpha_step: f64,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl MonogamyArgs {
    pub fn alpha(&self) -> CliResult<Range> {
        alpha_range(self.alpha_start, self.alpha_end, self.alpha_step)
    }
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}
