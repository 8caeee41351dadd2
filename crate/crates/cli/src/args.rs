use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "pd2",
    version,
    about = "Two-parameter Poisson-Dirichlet samplers, exact formulas and deviation scans"
)]
pub struct Cli {
    /// Master seed; required by every stochastic command.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "columnar")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Gem,
    Subordinator,
    Importance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    J1,
    I,
    S1,
    S,
    Sn,
    LambdaStar,
    Sigma2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Consistency,
    Contraction,
    Invariants,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw ranked PD(α, θ) samples.
    #[command(allow_negative_numbers = true)]
    Sample {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, value_enum, default_value = "gem")]
        method: Method,
        /// Number of samples.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// GEM residual-mass target.
        #[arg(long, default_value_t = 1e-6)]
        tail_eps: f64,
        /// Subordinator jump floor.
        #[arg(long, default_value_t = 1e-8)]
        jump_floor: f64,
        /// Stable-jump stopping ratio for importance sampling.
        #[arg(long, default_value_t = 1e-6)]
        stop_eps: f64,
        /// Ranked weights reported per sample.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// CDF and log-survival of the largest subordinator jump.
    #[command(name = "cdf-v1")]
    CdfV1 {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        s_grid: String,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
    },
    /// Joint density of the leading ranked weights.
    Density {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 1)]
        n_dim: usize,
        /// Points as `p1,p2;q1,q2`.
        #[arg(long)]
        points: String,
        /// Cache directory for the empirical g; defaults to `PD2_CACHE_DIR`.
        #[arg(long)]
        g_cache_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        g_samples: usize,
    },
    /// Evaluate one rate function at a point.
    #[command(allow_negative_numbers = true)]
    Rates {
        #[arg(long, value_enum)]
        which: Which,
        /// Scalar or comma list, depending on `--which`.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<f64>,
        /// Scalar or comma list, depending on `--which`.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Exact moderate-deviation scan of the largest jump.
    #[command(name = "mdp-v1", allow_negative_numbers = true)]
    MdpV1 {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        theta_grid: String,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
    },
    /// Monte Carlo moderate-deviation scan of the largest weight.
    #[command(name = "mdp-p1", allow_negative_numbers = true)]
    MdpP1 {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        theta_grid: String,
        #[arg(long)]
        reps: usize,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
    },
    /// Homozygosity central limit check.
    #[command(name = "clt-hm")]
    CltHm {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        reps: usize,
    },
    /// Small-parameter large-deviation staircase with α = θ = a.
    #[command(name = "small-ldp")]
    SmallLdp {
        #[arg(long)]
        a_grid: String,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        reps: usize,
    },
    /// Self-checks.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample { .. } => "sample",
            Command::CdfV1 { .. } => "cdf-v1",
            Command::Density { .. } => "density",
            Command::Rates { .. } => "rates",
            Command::MdpV1 { .. } => "mdp-v1",
            Command::MdpP1 { .. } => "mdp-p1",
            Command::CltHm { .. } => "clt-hm",
            Command::SmallLdp { .. } => "small-ldp",
            Command::Check { .. } => "check",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        match self {
            Command::Sample { .. }
            | Command::Density { .. }
            | Command::MdpP1 { .. }
            | Command::CltHm { .. }
            | Command::SmallLdp { .. } => true,
            Command::Check { suite, .. } => *suite != Suite::Contraction,
            _ => false,
        }
    }
}
