use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ogstv::KernelSpec;

#[derive(Debug, Parser)]
#[command(
    name = "ogstv",
    version,
    about = "Deblur images corrupted by salt-and-pepper noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Blur a clean image and corrupt it with salt-and-pepper noise.
    Degrade(DegradeArgs),
    /// Restore a degraded observation.
    Deblur(DeblurArgs),
    /// Print PSNR, SSIM and relative error of a test image against a reference.
    Evaluate(EvaluateArgs),
    /// Degrade and restore clean images over a parameter grid, writing one CSV row per run.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Admm,
    FastAdmm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Admm => "admm",
            Method::FastAdmm => "fast-admm",
        }
    }
}

#[derive(Debug, Args)]
pub struct DegradeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `gaussian:SIZE:SIGMA` or `mean:SIZE`.
    #[arg(long)]
    pub kernel: KernelSpec,
    /// Fraction of pixels to corrupt, in [0, 1].
    #[arg(long)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

/// Solver settings shared by `deblur` and `sweep`.
#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Method::Admm)]
    pub method: Method,
    /// Successive-iterate relative change that ends the iteration.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Record wall-clock seconds in the CSV (makes the output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct DeblurArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub kernel: KernelSpec,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Fidelity exponent; defaults from `--noise`.
    #[arg(long)]
    pub p: Option<f64>,
    /// Fidelity weight; defaults from `--noise`.
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub group_size: usize,
    /// Noise level of the observation, used to pick default `p` and `mu`.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Seed that produced the observation; only recorded in the CSV.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: PathBuf,
    /// Clean reference for metrics.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    /// Append a result row to this CSV (needs `--ref`).
    #[arg(long, requires = "reference")]
    pub metrics_csv: Option<PathBuf>,
    /// Identifier written to the CSV; defaults to the input file stem.
    #[arg(long)]
    pub image_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Clean image; repeat for several.
    #[arg(long, required = true)]
    pub clean: Vec<PathBuf>,
    #[arg(long)]
    pub kernel: KernelSpec,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Comma-separated; defaults per noise level when omitted.
    #[arg(long, value_delimiter = ',')]
    pub mu: Vec<f64>,
    /// Comma-separated; defaults per noise level when omitted.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub group_size: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub noise: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub output: PathBuf,
}
