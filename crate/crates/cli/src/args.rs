//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "impact",
    version,
    about = "Impact-model toolbox for fixed-base serial manipulators",
    long_about = "Computes candidate inverse inertia matrices, predicts contact impulses, \
                  simulates viscoelastic impacts with event detection and energy bookkeeping, \
                  and identifies contact parameters from measured force profiles."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Inverse inertia matrices and effective masses at a configuration
    Iim(IimArgs),
    /// Impulse predictions per candidate at one or more approach speeds
    Impulse(ImpulseArgs),
    /// Simulate one impact and export the trace and its events
    Simulate(SimulateArgs),
    /// Fit contact parameters to measured force profiles
    Identify(IdentifyArgs),
    /// Velocity sweep: impulse predictions plus simulated outcomes per speed
    Sweep(SweepArgs),
}

/// Contact-model family selector.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Spring,
    Maxwell,
    Viscoelastic,
}

/// Effective-mass source when it's not given explicitly.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IimMethodArg {
    Gm,
    Em,
    Crb,
    CrbFlex,
}

impl From<IimMethodArg> for impact_dynamics::iim::IimMethod {
    fn from(value: IimMethodArg) -> Self {
        use impact_dynamics::iim::IimMethod;
        match value {
            IimMethodArg::Gm => IimMethod::Gm,
            IimMethodArg::Em => IimMethod::Em,
            IimMethodArg::Crb => IimMethod::Crb,
            IimMethodArg::CrbFlex => IimMethod::CrbFlex,
        }
    }
}

#[derive(Args)]
pub struct ChainSelect {
    /// Chain description file (TOML)
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Joint configuration, comma-separated radians/meters
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Scenario file providing chain, q, speed, and model defaults
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

#[derive(Args)]
pub struct IimArgs {
    #[command(flatten)]
    pub chain: ChainSelect,
    /// Output directory
    #[arg(long, default_value = "impact_out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ImpulseArgs {
    #[command(flatten)]
    pub chain: ChainSelect,
    /// Approach speeds in m/s, comma-separated
    #[arg(long)]
    pub velocity: Option<String>,
    /// Coefficient of restitution applied to restitution-end predictions
    /// and the algebraic impulse (0 compares compression-end apples to apples)
    #[arg(long, default_value_t = 0.0)]
    pub e_r: f64,
    /// CSV with measured impulses (`velocity_mps,impulse_ns`) to join in
    #[arg(long)]
    pub measured: Option<PathBuf>,
    #[arg(long, default_value = "impact_out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub chain: ChainSelect,
    /// Contact-force family
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Spring constant k, N/m
    #[arg(long)]
    pub k: Option<f64>,
    /// Dashpot coefficient c (N s/m for maxwell, N s/m^2 for viscoelastic)
    #[arg(long)]
    pub c: Option<f64>,
    /// Effective mass in kg; taken from the chain when omitted
    #[arg(long)]
    pub m_star: Option<f64>,
    /// IIM method used to derive the effective mass from the chain
    #[arg(long, value_enum, default_value_t = IimMethodArg::Crb)]
    pub iim_method: IimMethodArg,
    /// Approach speed, m/s (along the negative normal)
    #[arg(long)]
    pub velocity: Option<f64>,
    #[arg(long, default_value = "impact_out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct IdentifyArgs {
    /// Force-profile CSV files (`time_s,force_n`; optional `.json` sidecars)
    #[arg(long, num_args = 1.., required = true)]
    pub profiles: Vec<PathBuf>,
    /// Effective mass in kg (alternative: derive via --chain/--q)
    #[arg(long)]
    pub m_star: Option<f64>,
    /// Chain file to derive the effective mass from
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Joint configuration for --chain
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// IIM method for the chain-derived effective mass
    #[arg(long, value_enum, default_value_t = IimMethodArg::Crb)]
    pub iim_method: IimMethodArg,
    /// Approach speeds (m/s, positive); one per profile or one broadcast to
    /// all. Sidecar metadata takes precedence.
    #[arg(long)]
    pub velocity: Option<String>,
    /// Model family to fit
    #[arg(long, value_enum, default_value_t = ModelArg::Viscoelastic)]
    pub model: ModelArg,
    /// Trim threshold in N applied before fitting (first-lobe extraction)
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    /// Worker threads for per-profile fits
    #[arg(long)]
    pub parallel: Option<usize>,
    #[arg(long, default_value = "impact_out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub chain: ChainSelect,
    /// Approach speeds in m/s, comma-separated; rows keep this order
    #[arg(long)]
    pub velocity: Option<String>,
    #[command(flatten)]
    pub model_flags: SweepModelFlags,
    /// Worker threads for per-velocity simulations
    #[arg(long)]
    pub parallel: Option<usize>,
    #[arg(long, default_value = "impact_out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SweepModelFlags {
    /// Contact-force family (overrides the scenario)
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Spring constant k, N/m
    #[arg(long)]
    pub k: Option<f64>,
    /// Dashpot coefficient c
    #[arg(long)]
    pub c: Option<f64>,
    /// Effective mass in kg; derived from the chain when omitted
    #[arg(long)]
    pub m_star: Option<f64>,
    /// IIM method for the chain-derived effective mass
    #[arg(long, value_enum, default_value_t = IimMethodArg::Crb)]
    pub iim_method: IimMethodArg,
}

/// Parses a comma-separated list of floats.
pub fn parse_float_list(text: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| anyhow::anyhow!("invalid {what} entry `{s}`: {e}"))
        })
        .collect()
}
