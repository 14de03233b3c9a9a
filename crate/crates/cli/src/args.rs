use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fracsteer", version, about = "Fractional impulsive control: evaluation, solving, steering and optimization")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Manifest path; defaults to `<out>.manifest.json`, or stderr without `--out`.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate E_{alpha,beta}(z) at a point or on a grid; CSV `alpha,beta,z,value`.
    Ml(MlArgs),
    /// Solve the uncontrolled problem; CSV `t,mode_1..mode_N,is_left_limit`.
    Solve(SolveArgs),
    /// Steer to a target at one regularization; JSON report.
    Steer(SteerArgs),
    /// Steer for a decreasing list of regularizations; CSV `eps,terminal_error,control_energy,outer_iters`.
    Sweep(SweepArgs),
    /// Minimize the cost over piecewise constant controls; JSON with `J_opt`.
    Optimize(OptimizeArgs),
    /// Print the contraction factor and validate the problem constants.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct MlArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Single argument.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "grid", conflicts_with = "grid")]
    pub z: Option<f64>,
    /// `from,to,steps`: steps + 1 equally spaced arguments.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SteeringArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// JSON file `{"coeffs": [...]}`.
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, default_value_t = 0.005)]
    pub dt: f64,
    /// Outer tolerance on the control change.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub inner_tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_outer: usize,
    #[arg(long, default_value_t = 200)]
    pub max_inner: usize,
    /// Control relaxation in [0.1, 1].
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
}

#[derive(Debug, Args)]
pub struct SteerArgs {
    #[command(flatten)]
    pub steering: SteeringArgs,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub steering: SteeringArgs,
    /// Comma-separated, strictly decreasing.
    #[arg(long)]
    pub eps_list: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// JSON cost file; the unit quadratic cost when omitted.
    #[arg(long)]
    pub cost: Option<PathBuf>,
    #[arg(long)]
    pub intervals: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = f64::NEG_INFINITY)]
    pub lower: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = f64::INFINITY)]
    pub upper: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, default_value_t = 20_000)]
    pub max_evals: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub stationarity_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Random state pairs for the empirical Lipschitz check.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
