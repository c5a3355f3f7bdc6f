use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subwave_core::storage::NamedState;
use subwave_core::{ChainConfig, C64};
use thiserror::Error;

use crate::angle::Angle;
use crate::error::CliError;
use crate::manifest::ConfigRecord;

#[derive(Debug, Parser)]
#[command(
    name = "subwave",
    version,
    about = "Collective decay and subradiant storage in waveguide-coupled qubit chains"
)]
pub struct Cli {
    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Suppress diagnostics on stderr
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenmodes of the coupling matrix
    Spectrum(SpectrumArgs),
    /// Time evolution of a single-excitation state
    Evolve(EvolveArgs),
    /// Spectral summary over a θ grid
    Sweep(SweepArgs),
    /// Run the built-in invariant checks
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Number of qubits
    #[arg(long)]
    pub n: usize,

    /// Phase between neighbours: <float>, <float>pi or pi
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Angle,

    #[arg(long, default_value_t = 1.0)]
    pub gamma0: f64,
}

impl ChainArgs {
    pub fn config(&self) -> Result<ChainConfig, CliError> {
        Ok(ChainConfig::new(self.n, self.theta.radians(), self.gamma0)?)
    }

    pub fn record(&self) -> ConfigRecord {
        ConfigRecord {
            n: self.n,
            theta: self.theta.radians(),
            theta_input: self.theta.to_string(),
            gamma0: self.gamma0,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Eigen,
    Ode,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    /// dicke | alternating | sym-sub | antisym-sub | single:<j> | custom:<re:im,...>
    #[arg(long, allow_hyphen_values = true)]
    pub state: StateSpec,

    #[arg(long, default_value_t = 10.0)]
    pub tmax: f64,

    #[arg(long, default_value_t = 1000)]
    pub samples: usize,

    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long, allow_hyphen_values = true)]
    pub theta_min: Angle,

    #[arg(long, allow_hyphen_values = true)]
    pub theta_max: Angle,

    #[arg(long, default_value_t = 101)]
    pub steps: usize,

    #[arg(long, default_value_t = 1.0)]
    pub gamma0: f64,

    /// Worker threads for the grid
    #[arg(long)]
    pub parallel: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,

    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    #[arg(long, env = "SUBWAVE_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Named(NamedState),
    Custom(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid state `{0}`: expected dicke, alternating, sym-sub, antisym-sub, single:<j> or custom:<re:im,...>")]
pub struct StateSpecError(String);

impl FromStr for StateSpec {
    type Err = StateSpecError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || StateSpecError(text.to_string());
        let named = match text {
            "dicke" => Some(NamedState::Dicke),
            "alternating" => Some(NamedState::Alternating),
            "sym-sub" => Some(NamedState::SymmetricSubradiant),
            "antisym-sub" => Some(NamedState::AntiSymmetricSubradiant),
            _ => None,
        };
        if let Some(name) = named {
            return Ok(StateSpec::Named(name));
        }
        if let Some(j) = text.strip_prefix("single:") {
            return j
                .parse()
                .map(|j| StateSpec::Named(NamedState::Single(j)))
                .map_err(|_| err());
        }
        if let Some(list) = text.strip_prefix("custom:") {
            let amplitudes = list
                .split(',')
                .map(|pair| {
                    let (re, im) = pair.split_once(':').ok_or_else(err)?;
                    let re: f64 = re.trim().parse().map_err(|_| err())?;
                    let im: f64 = im.trim().parse().map_err(|_| err())?;
                    Ok(C64::new(re, im))
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(StateSpec::Custom(amplitudes));
        }
        Err(err())
    }
}
