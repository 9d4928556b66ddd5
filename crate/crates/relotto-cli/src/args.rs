use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "otto",
    version,
    about = "Relativistic quantum Otto cycle toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Energetics of one cycle at a fixed operating point.
    #[command(allow_negative_numbers = true)]
    Cycle(CycleArgs),
    /// Every efficiency bound at one (tau, v) point.
    #[command(allow_negative_numbers = true)]
    Bounds(BoundsArgs),
    /// Adiabaticity parameter of a drive protocol.
    #[command(allow_negative_numbers = true)]
    Lambda(LambdaArgs),
    /// High-temperature work against compression ratio.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Adiabatic Monte Carlo ensemble of (work, efficiency) points.
    #[command(allow_negative_numbers = true)]
    Scatter(EnsembleArgs),
    /// Sudden-switch Monte Carlo ensemble binned by efficiency.
    #[command(allow_negative_numbers = true)]
    Hist(EnsembleArgs),
    /// Numeric maximisation of the high-temperature work.
    #[command(allow_negative_numbers = true)]
    Optimize(OptimizeArgs),
    /// Run the full oracle and regression suite.
    Verify(VerifyArgs),
}

/// Where inputs come from and outputs go. Not part of the echoed config.
#[derive(Args, Debug, Clone, Default)]
pub struct Io {
    /// JSON object keyed by flag names, or a manifest from an earlier run.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the result here; tables also get `<stem>.manifest.json`.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2,
    Fig3,
    Fig5,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum RegimeArg {
    Adiabatic,
    Sudden,
}

impl From<RegimeArg> for relotto::Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Adiabatic => relotto::Regime::Adiabatic,
            RegimeArg::Sudden => relotto::Regime::Sudden,
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct CycleArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_h: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_h: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    /// Adiabaticity parameter, at least 1.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// sudden, adiabatic, linear_omega, linear_omega_squared, or a `t,omega` CSV file.
    #[arg(long, value_name = "NAME|FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_protocol: Option<String>,
    /// Stroke duration for the ramp protocols.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct BoundsArgs {
    /// Temperature ratio beta_h / beta_c.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct LambdaArgs {
    /// Start frequency of the stroke.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    /// End frequency of the stroke.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_h: Option<f64>,
    /// sudden, adiabatic, linear_omega, linear_omega_squared, or a `t,omega` CSV file.
    #[arg(long, value_name = "NAME|FILE")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_protocol: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// One velocity or a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
    /// Compression ratios as `start:stop:step`, both ends inclusive.
    #[arg(long, value_name = "A:B:STEP")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<String>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeArg>,
    /// Hot-bath inverse temperature, default 1.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_h: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct EnsembleArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Open sampling interval `lo:hi`.
    #[arg(long, value_name = "LO:HI")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c_range: Option<String>,
    /// Open sampling interval `lo:hi`.
    #[arg(long, value_name = "LO:HI")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_h_range: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_c: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_h: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    /// Histogram bins over [0, bound]. Only for `hist`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OptimizeArgs {
    /// Both regimes when omitted.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeArg>,
    /// Comma-separated temperature ratios.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<f64>>,
    /// Comma-separated velocities.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
    /// Bracket width at which the golden-section search stops.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[command(flatten)]
    #[serde(skip)]
    pub io: Io,
}
