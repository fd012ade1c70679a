//! Command-line grammar. Values that may also come from a config file are
//! optional here; defaults are applied after merging (see `config`).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::List;

#[derive(Debug, Parser)]
#[command(
    name = "degenlab",
    version,
    about = "Regime classification, radial solves and estimate checks for -div(a grad u/(1+|u|)^theta) = f",
    after_help = "Exit codes: 0 success, 2 invalid input, 3 solver non-convergence (partial output written), \
                  4 strict estimate failure.\nWorker threads: DEGENLAB_WORKERS (default: number of processors)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a point (N, theta, m) of the phase plane (JSON report)
    Classify(ClassifyArgs),
    /// Solve one radial problem (CSV solution, JSON report)
    Solve(SolveArgs),
    /// Solve the truncated problems T_n(f) and print sequence diagnostics
    Sequence(SequenceArgs),
    /// Check a priori estimates along the truncation sequence (ledger CSV)
    Estimates(EstimatesArgs),
    /// Fit the blow-up exponent and locate the gradient integrability threshold
    Exponents(ExponentsArgs),
    /// Emit the region of every point of a (theta, m) grid
    PhaseDiagram(PhaseArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output path, `-` for standard output [default: -]
    #[arg(long, value_name = "PATH")]
    pub out: Option<String>,
    /// Output format: csv or json [default depends on the subcommand]
    #[arg(long, value_name = "FORMAT")]
    pub format: Option<String>,
    /// Plain-text key=value file; keys are long flag names, flags win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Space dimension, at least 3 [default: 3]
    #[arg(long = "N", value_name = "N")]
    pub dim: Option<u32>,
    /// Degeneracy exponent in [0, 1] [default: 0.75]
    #[arg(long)]
    pub theta: Option<f64>,
    /// Source f = amp * r^-gamma [default: 2.4]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Source amplitude [default: 1]
    #[arg(long)]
    pub amp: Option<f64>,
    /// Coefficient a(r): a constant, or `sin:BASE,AMPLITUDE,FREQUENCY` [default: 1]
    #[arg(long, value_name = "COEF")]
    pub coef: Option<String>,
    /// Domain: ball or annulus [default: ball]
    #[arg(long)]
    pub mode: Option<String>,
    /// Inner radius of the annulus [default: 0.1]
    #[arg(long)]
    pub rmin: Option<f64>,
    /// Dirichlet value on the inner sphere [default: closed form if one exists, else 0]
    #[arg(long)]
    pub inner: Option<f64>,
    /// Number of mesh cells [default: 1024]
    #[arg(long = "M", value_name = "M")]
    pub cells: Option<usize>,
    /// Mesh grading exponent, r_i = (i/M)^g [default: 3]
    #[arg(long)]
    pub grading: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct IterationArgs {
    /// Picard iteration cap [default: 200]
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Relative update tolerance [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Initial relaxation in (0, 1] [default: 1]
    #[arg(long)]
    pub damping: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    /// Space dimension, at least 3 [default: 3]
    #[arg(long = "N", value_name = "N")]
    pub dim: Option<u32>,
    /// Degeneracy exponent; decimals and fractions are compared exactly
    #[arg(long)]
    pub theta: Option<String>,
    /// Summability exponent of f
    #[arg(long)]
    pub m: Option<String>,
    /// f belongs to L log L (only meaningful at m = 1)
    #[arg(long)]
    pub llogl: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// oracle (transformed linear solve) or picard [default: oracle]
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub iteration: IterationArgs,
    /// Also write the JSON report to this path
    #[arg(long, value_name = "PATH")]
    pub report: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SequenceArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub iteration: IterationArgs,
    /// Truncation levels, comma separated [default: 1,2,4,...,1024]
    #[arg(long)]
    pub schedule: Option<List<f64>>,
    /// Also write the per-level JSON reports to this path
    #[arg(long, value_name = "PATH")]
    pub report: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EstimatesArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub iteration: IterationArgs,
    /// Truncation levels, comma separated [default: 1,2,4,...,1024]
    #[arg(long)]
    pub schedule: Option<List<f64>>,
    /// Estimates to check, comma separated [default: all]
    #[arg(long)]
    pub ids: Option<String>,
    /// Truncation heights k, comma separated [default: 1,2,4,8]
    #[arg(long = "k-list")]
    pub k_list: Option<List<f64>>,
    /// Summability exponent of f [default: lower critical value]
    #[arg(long)]
    pub m: Option<f64>,
    /// Exponent of the weighted energy checks [default: (N-2)/(2(N-1))]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Seed of the sampled inequality [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of samples of the sampled inequality [default: 100000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Exit with code 4 if an explicit check fails
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExponentsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Radii of the slope fit, `lo,hi` [default: 1e-6,1e-3]
    #[arg(long)]
    pub window: Option<List<f64>>,
    /// Gradient exponents searched for the threshold, `lo,hi` [default: 1,2]
    #[arg(long = "q-range")]
    pub q_range: Option<List<f64>>,
    /// Cell counts of the threshold refinement study [default: 256,512,1024,2048,4096]
    #[arg(long)]
    pub refinements: Option<List<usize>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseArgs {
    /// Space dimension, at least 3 [default: 3]
    #[arg(long = "N", value_name = "N")]
    pub dim: Option<u32>,
    /// Subdivisions `THETA_STEPS,M_STEPS` [default: 100,100]
    #[arg(long)]
    pub grid: Option<List<usize>>,
    /// Smallest m [default: 1]
    #[arg(long = "m-min")]
    pub m_min: Option<String>,
    /// Largest m [default: N]
    #[arg(long = "m-max")]
    pub m_max: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}
