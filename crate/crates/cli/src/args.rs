use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "pcboot", version, about = "Cyclic autocorrelation and block bootstrap tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a series and write it as single-column CSV.
    Simulate(SimulateArgs),
    /// Cyclic autocorrelation estimate at one (λ, τ).
    Estimate(EstimateArgs),
    /// Bootstrap significance scan over λ ∈ [0, π] at a fixed lag.
    Scan(ScanArgs),
    /// Bootstrap consistency or block-variance diagnostics.
    Diagnose(DiagnoseArgs),
    /// Re-run the command recorded in a manifest and compare output hashes.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Par1,
    Modulated,
    Iid,
    Zeros,
}

/// Model parameters shared by `simulate` and `diagnose`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Noise standard deviation (PAR(1) innovations, iid draws, modulated base).
    #[arg(long, default_value_t = 1.0)]
    pub sd: f64,
    /// PAR(1) burn-in steps before t = 1.
    #[arg(long, default_value_t = 200)]
    pub burn_in: usize,
    /// Modulated envelope `offset + amp·cos(2πt/period)`.
    #[arg(long, default_value_t = 1.0)]
    pub offset: f64,
    #[arg(long, default_value_t = 0.5)]
    pub amp: f64,
    #[arg(long, default_value_t = 3.0)]
    pub period: f64,
    /// Use a stationary AR(1) base with this coefficient instead of iid noise.
    #[arg(long)]
    pub ar_phi: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output CSV; a manifest is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: i64,
    /// Also write the JSON row here, with a manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub tau: i64,
    #[arg(long)]
    pub block: usize,
    #[arg(long, default_value_t = 500)]
    pub replicates: usize,
    #[arg(long, default_value_t = pcboot::detect::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha_lo: f64,
    #[arg(long, default_value_t = 0.95)]
    pub alpha_hi: f64,
    #[arg(long)]
    pub seed: u64,
    /// Frequency tolerance (radians) for period inference.
    #[arg(long, default_value_t = 0.05)]
    pub period_tol: f64,
    #[arg(long, default_value_t = 12)]
    pub max_period: u32,
    /// Per-frequency table.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
    /// JSON summary; also printed to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Consistency,
    Blockvar,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DiagnoseArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub seed: u64,
    /// Sample sizes (consistency) or the single series length (blockvar).
    /// Defaults: 300,1200,4800 and 600.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Block lengths for blockvar. Default 9,51,249.
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<usize>,
    /// Block rule exponent q in b = ⌈n^q⌉ (consistency).
    #[arg(long, default_value_t = 0.4)]
    pub q: f64,
    /// Bootstrap replicates B (consistency).
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
    /// Independent Monte Carlo series R.
    #[arg(long)]
    pub monte_carlo: Option<usize>,
    /// Allowed increase between consecutive rows. Defaults: 0.02 and 0.06.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Largest acceptable value in the last row. Defaults: 0.10 and 0.15.
    #[arg(long)]
    pub max_final: Option<f64>,
    /// Reference σ² for blockvar; taken from the model when known, otherwise
    /// calibrated at the largest block.
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}
