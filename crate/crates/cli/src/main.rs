//! `philophase` command-line front end.

mod commands;
mod complex;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use philophase::states::Family;

use crate::output::Format;

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or state parameters (exit 2).
    Input(String),
    /// An output file or stream could not be written (exit 3).
    Write(String),
    /// A computation did not finish, e.g. a cutoff ceiling was hit (exit 4).
    Numeric(String),
    /// `verify` ran and at least one check failed (exit 1).
    VerifyFailed(usize),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Write(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Write(m) => write!(f, "write failed: {m}"),
            CliError::Numeric(m) => write!(f, "computation failed: {m}"),
            CliError::VerifyFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<philophase::Error> for CliError {
    fn from(e: philophase::Error) -> Self {
        use philophase::Error as E;
        match e {
            E::Domain(_) | E::InvalidSpec(_) | E::FamilyMismatch(_) | E::NotApplicable(_) => {
                CliError::Input(e.to_string())
            }
            E::CutoffExceeded { .. } | E::Degenerate(_) | E::Convergence(_) => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "philophase", version, about = "Photon statistics, phase distributions and uncertainty functionals of SU(1,1) states")]
pub struct Cli {
    /// TOML file with tail_tol, phase_tol and max_cutoff. Flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Amplitude mass allowed beyond the Fock cutoff.
    #[arg(long, global = true)]
    pub tail_tol: Option<f64>,
    /// Truncation threshold for the phase coefficients.
    #[arg(long, global = true)]
    pub phase_tol: Option<f64>,
    /// Ceiling on cutoffs and series lengths (also PHILOPHASE_MAX_CUTOFF).
    #[arg(long, global = true)]
    pub max_cutoff: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Photon statistics of one state as a single-row table.
    Stats {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sampled phase distribution Q(θ) over one period.
    PhaseDist {
        #[command(flatten)]
        state: StateArgs,
        /// Number of equally spaced samples.
        #[arg(long, default_value_t = 256)]
        points: usize,
        /// Start of the sampled window; defaults to the mean phase minus π.
        #[arg(long, allow_negative_numbers = true)]
        theta0: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep one parameter and tabulate selected quantities.
    Scan(ScanArgs),
    /// Run an invariant suite against the brute-force oracle and print a JSON report.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Cutoff for operator-matrix checks.
        #[arg(long, default_value_t = 64)]
        cutoff: usize,
        /// Threshold for closed form versus brute-force comparisons.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contraction of |z,σ⟩₊ to Glauber states along |z| = 2σ.
    Contract {
        #[arg(long, default_value_t = 5)]
        from: u32,
        #[arg(long, default_value_t = 50)]
        to: u32,
        #[arg(long, default_value_t = 1)]
        step: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Algebra,
    Eigen,
    Identity,
    Phase,
    Uncertainty,
    Contraction,
    All,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: philophase::Error| e.to_string())
}

/// State selection. The complex label is given either as a literal
/// (`--zeta`, `--z` or `--alpha`, by family) or as `--mod` with optional `--arg`.
#[derive(Args, Debug, Clone, Default)]
pub struct StateArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// Bargmann index as a fraction, e.g. 1/2 or 3/2.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Modulus of the complex label.
    #[arg(long = "mod")]
    pub modulus: Option<f64>,
    /// Argument of the complex label in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub arg: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<i64>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; a `<file>.meta.json` sidecar records run metadata.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Mod,
    Arg,
    K,
    Sigma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum)]
pub enum Quantity {
    #[value(name = "mean_n")]
    MeanN,
    #[value(name = "var_n")]
    VarN,
    #[value(name = "g2")]
    G2,
    #[value(name = "q_theta_profile")]
    QThetaProfile,
    #[value(name = "var_phi")]
    VarPhi,
    #[value(name = "var_cos")]
    VarCos,
    #[value(name = "V")]
    V,
    #[value(name = "R1")]
    R1,
    #[value(name = "R2")]
    R2,
    #[value(name = "U")]
    U,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum)]
    pub sweep: SweepParam,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    /// Number of points for continuous sweeps; k and σ sweeps visit every value.
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    /// Geometric instead of linear spacing.
    #[arg(long)]
    pub log: bool,
    /// Comma-separated columns to compute.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub quantities: Vec<Quantity>,
    /// Samples per Q(θ) profile.
    #[arg(long, default_value_t = 64)]
    pub profile_points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("philophase: {e}");
            ExitCode::from(e.code())
        }
    }
}
