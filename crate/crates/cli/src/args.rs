use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "starlike",
    version,
    about = "Sharp beta, sufficient conditions and disk checks for weighted integral transforms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the sharp beta for a weight.
    Beta(BetaArgs),
    /// Run sufficient-condition checks on a weight.
    Check(CheckArgs),
    /// Apply the transform to a series of (f/z)^delta.
    Transform(TransformArgs),
    /// Check class membership, starlikeness and sharpness on disk grids.
    Verify(VerifyArgs),
    /// Full pipeline for one weight and parameter set.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub zeta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct WeightArgs {
    /// Catalog name (bernardi, uniform, komatu, hohlov, carlson_shaffer,
    /// two_param, ali_singh) or a JSON object {"kind": ..., "params": {...}}.
    #[arg(long)]
    pub weight: String,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Number of Chebyshev radii.
    #[arg(long, default_value_t = 24)]
    pub grid_radii: usize,
    /// Number of equally spaced angles per radius.
    #[arg(long, default_value_t = 128)]
    pub grid_angles: usize,
    /// Largest radius of the starlikeness grid.
    #[arg(long, default_value_t = 0.99)]
    pub r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quadrature,
    Series,
    #[value(name = "5f4")]
    FiveFFour,
    Analytic,
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Quadrature)]
    pub method: MethodArg,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Terms for the termwise series.
    #[arg(long, default_value_t = 100_000)]
    pub terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    /// Every check that applies to the parameters.
    All,
    /// Monotonicity of the cumulative kernel.
    #[value(name = "T3_3", alias = "T3_3_monotone")]
    T33,
    /// Differential bound, gamma > 0.
    #[value(name = "T4_1", alias = "T4_1_gamma_pos")]
    T41,
    /// Differential bound, gamma = 0.
    #[value(name = "T4_2", alias = "T4_2_gamma_zero")]
    T42,
    /// Parameter tables of the catalog operators.
    #[value(name = "op", alias = "op_bound")]
    Op,
    /// Minimum of the N functional.
    #[value(name = "N", alias = "N_functional")]
    N,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long, value_enum, default_value_t = TheoremArg::All)]
    pub theorem: TheoremArg,
    /// Grid size for the monotonicity check.
    #[arg(long, default_value_t = 2001)]
    pub grid_size: usize,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
    /// JSON array of [re, im] pairs for (f/z)^delta; the extremal member at
    /// the sharp beta when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Truncation order for the generated member.
    #[arg(long)]
    pub order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// JSON array of [re, im] pairs for (f/z)^delta; the extremal member at
    /// the sharp beta when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Class parameter; the sharp beta when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub order: Option<usize>,
    /// Tolerance of the starlikeness margin.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Dump the starlikeness grid samples as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
