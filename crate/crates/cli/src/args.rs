//! Command-line grammar.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ajk", version, about = "Affine processes with stochastic discontinuities")]
pub struct Cli {
    /// Worker threads for simulation (default: all cores).
    #[arg(long, global = true, env = "AJK_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Riccati equations backward from (T, u); writes the solution table as CSV.
    Solve(SolveArgs),
    /// Admissibility and conservativeness report (JSON).
    Check(CheckArgs),
    /// Simulate paths on a time grid (CSV: t, path_id, x_1, ...).
    Simulate(SimulateArgs),
    /// Bond prices P(t,T) along one simulated path (CSV).
    Price(PriceArgs),
    /// Drift-condition residuals on random (t,T) pairs (JSON).
    VerifyDrift(DriftArgs),
    /// Monte Carlo martingale test of discounted bond prices (JSON).
    VerifyMartingale(MartingaleArgs),
    /// Solver characteristic function against Monte Carlo (JSON).
    CompareCharfn(CompareArgs),
}

/// Catalog model with its parameters, or a parameter-set JSON file.
#[derive(Debug, Args)]
#[group(skip)]
#[command(group(ArgGroup::new("source").required(true).multiple(false)))]
pub struct ModelArgs {
    /// Catalog model name.
    #[arg(long, group = "source")]
    pub model: Option<String>,
    /// Parameter-set JSON file.
    #[arg(long, group = "source")]
    pub model_file: Option<PathBuf>,
    /// Extra parameters as `key=value` pairs separated by commas; lists use ':' (`jumps=1:2`).
    #[arg(long)]
    pub params: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub jumps: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub a0: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    /// Model horizon (defaults to T).
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "T")]
    pub t: f64,
    /// Terminal argument, components separated by commas (`0+1i,-0.5`).
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, default_value_t = 1e-11)]
    pub atol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub rtol: f64,
    /// CSV output (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON jump log.
    #[arg(long)]
    pub jump_log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Terminal time for the conservativeness probe (defaults to the horizon).
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "T")]
    pub t: f64,
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Initial state, comma separated (defaults to zero).
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "T")]
    pub t: f64,
    /// Argument of the characteristic function; repeat for several points.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub u: Vec<String>,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Vasiček loadings; with `--jumps`, the discontinuous variant.
    Vasicek,
    /// Linear-kernel loadings on the Vasiček state.
    Gaussian,
}

/// Term-structure model on the state (A, ∫r, r) of a Vasiček short rate.
#[derive(Debug, Args)]
pub struct TermArgs {
    #[arg(long, value_enum, default_value_t = Family::Vasicek)]
    pub family: Family,
    #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    /// Short-rate shock standard deviation at the jump times.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Jump times separated by ':' or ','.
    #[arg(long)]
    pub jumps: Option<String>,
    #[arg(long, default_value_t = 0.03, allow_hyphen_values = true)]
    pub r0: f64,
    /// Flat initial forward rate for the gaussian family (defaults to r0).
    #[arg(long, allow_hyphen_values = true)]
    pub f0: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    pub horizon: f64,
    /// Multiply the first loading component (negative controls).
    #[arg(long, default_value_t = 1.0)]
    pub perturb: f64,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub term: TermArgs,
    /// Valuation times separated by ':' or ','.
    #[arg(long, default_value = "0")]
    pub times: String,
    /// Maturities separated by ':' or ','.
    #[arg(long, default_value = "1:2:3:4:5")]
    pub maturities: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    #[command(flatten)]
    pub term: TermArgs,
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MartingaleArgs {
    #[command(flatten)]
    pub term: TermArgs,
    /// Bond maturity (defaults to the horizon).
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, default_value_t = 10)]
    pub checks: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
