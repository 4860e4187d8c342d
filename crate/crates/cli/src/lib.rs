//! Command-line driver: loads a JSON experiment configuration and runs the
//! analytic and Monte Carlo computations, writing CSV and JSON artifacts.
//!
//! Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
//! failure, 4 reference comparison failed, 1 I/O failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod config;

pub use config::{McConfig, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerics(String),
    #[error("{0}")]
    Acceptance(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerics(_) => 3,
            CliError::Acceptance(_) => 4,
        }
    }
}

impl From<bathtub_repair::Error> for CliError {
    fn from(e: bathtub_repair::Error) -> Self {
        match e {
            bathtub_repair::Error::Numerical(_) => CliError::Numerics(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bathtub-repair", version, about = "Imperfect repair model for bathtub-shaped failure rates")]
pub struct Cli {
    /// Worker threads for parallel sections (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected number of failures on [0, tau) for one repair degree.
    Expected(ExpectedArgs),
    /// Expected failures for δ1 = 0.0, 0.1, ..., 1.0, compared with the reference table.
    Table1(Table1Args),
    /// Simulate failure trajectories and report the Monte Carlo estimate.
    Simulate(SimulateArgs),
    /// Expected failures over a grid of first-repair degrees.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quadrature,
    Mc,
    Both,
}

impl MethodArg {
    pub fn quadrature(self) -> bool {
        matches!(self, MethodArg::Quadrature | MethodArg::Both)
    }

    pub fn monte_carlo(self) -> bool {
        matches!(self, MethodArg::Mc | MethodArg::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum SamplerArg {
    #[default]
    Inversion,
    Thinning,
}

impl From<SamplerArg> for bathtub_repair::Sampler {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Inversion => bathtub_repair::Sampler::Inversion,
            SamplerArg::Thinning => bathtub_repair::Sampler::Thinning,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ProcessArg {
    /// Repairs according to the configured policy.
    #[default]
    Repair,
    /// Minimal repairs only (non-homogeneous Poisson process).
    Nhpp,
    /// Replacement by a new system at every failure (renewal process).
    Renewal,
}

/// Monte Carlo settings shared by several commands; they override the
/// configuration's `mc` section.
#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = SamplerArg::Inversion)]
    pub sampler: SamplerArg,
}

#[derive(Debug, Clone, Args)]
pub struct ExpectedArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Replaces the policy's repair degree.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
    pub method: MethodArg,
    #[command(flatten)]
    pub mc: McArgs,
    /// Also write the JSON result to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Table1Args {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
    pub method: MethodArg,
    /// Replaces the configured horizon.
    #[arg(long)]
    pub tau: Option<f64>,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, default_value_t = ProcessArg::Repair)]
    pub process: ProcessArg,
    /// Trajectory CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the trajectory CSV and print only the estimate.
    #[arg(long)]
    pub summary_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Degree grid: a point count `N` (uniform on [0, 1]), `start:end:count`,
    /// or a comma-separated list. Defaults to the configuration's `deltas`,
    /// else 101 points.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
    pub method: MethodArg,
    #[command(flatten)]
    pub mc: McArgs,
    /// CSV destination; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line and returns what should go to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let Cli { threads, command } = cli;
    let exec = move || match command {
        Command::Expected(a) => commands::expected(&a),
        Command::Table1(a) => commands::table1(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Sweep(a) => commands::sweep(&a),
    };
    match threads {
        Some(n) => {
            if n == 0 {
                return Err(CliError::Config("--threads must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Io(format!("cannot start thread pool: {e}")))?;
            pool.install(exec)
        }
        None => exec(),
    }
}
