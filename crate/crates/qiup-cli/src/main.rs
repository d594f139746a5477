//! Command-line front end for the undetected-photon imaging simulator.
//!
//! Four subcommands cover the workflow: `simulate` renders a
//! phase-stepped frame stack from a declarative run file, `reconstruct`
//! rebuilds object maps from such a stack, `report` emits design and
//! sensitivity figures, and `oracle-check` compares the closed-form
//! interferometer rates against the exact state-vector model.
//!
//! Exit codes: 0 on success, 2 for validation errors (bad flags, bad
//! config, unreadable or inconsistent inputs), 3 for numerical
//! precondition failures (sampling too coarse, phase scan too sparse,
//! carrier out of band), and 1 when `oracle-check` finds a discrepancy.

mod config;
mod manifest;
mod oracle;
mod reconstruct;
mod report;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qiup_core::imaging::ImagingError;

/// Top-level command error; the variant picks the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, config or input files. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// Inputs are well formed but violate a numerical precondition of
    /// the requested computation. Exit code 3.
    #[error("{0}")]
    Precondition(String),
    /// The state-vector cross-check found a discrepancy. Exit code 1.
    #[error("{0}")]
    OracleFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::OracleFailed(_) => 1,
        }
    }
}

/// Sorts imaging failures into the two exit classes: resolution and
/// scan-density conditions are numerical preconditions, everything else
/// is malformed input.
pub fn from_imaging(e: ImagingError) -> CliError {
    match e {
        ImagingError::SamplingTooCoarse { .. }
        | ImagingError::PhaseGapTooLarge { .. }
        | ImagingError::UnevenPhaseSteps { .. }
        | ImagingError::CarrierTooSmall { .. }
        | ImagingError::CarrierTooLarge { .. } => CliError::Precondition(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "qiup",
    version,
    about = "Simulator and analysis tools for imaging with undetected photons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a phase-stepped interference frame stack from a run file
    Simulate(SimulateArgs),
    /// Rebuild object magnitude/phase maps from a frame directory
    Reconstruct(ReconstructArgs),
    /// Emit design comparisons or a phase-sensitivity sweep
    Report(ReportArgs),
    /// Check closed-form rates against the exact two-photon model
    OracleCheck(OracleArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Run configuration file (TOML)
    config: PathBuf,
    /// Write outputs here instead of the configured directory
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Override the number of phase steps
    #[arg(long)]
    frames: Option<u32>,
    /// Override the shot-noise seed
    #[arg(long)]
    seed: Option<u64>,
    /// Add shot noise at this mean photon count per pixel
    #[arg(long)]
    mean_counts: Option<f64>,
    /// Override the interferometer phase offset
    #[arg(long)]
    phi_in_rad: Option<f64>,
}

#[derive(Args)]
pub struct ReconstructArgs {
    /// Directory holding manifest.json and the frame files
    #[arg(long)]
    frames: PathBuf,
    /// Reconstruction method
    #[arg(long, value_enum)]
    method: Method,
    /// Output directory; defaults to <frames>/recon
    #[arg(long)]
    out: Option<PathBuf>,
}

/// How to turn a frame stack back into an object map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Per-pixel fringe visibility; magnitude only, needs a dense scan
    Visibility,
    /// Per-pixel max minus min over the scan; magnitude only
    ImageFunction,
    /// Complex demodulation of a uniform phase scan
    PhaseStepping,
    /// Fourier sideband filtering of a single tilted-reference frame
    OffAxis,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Which report to produce
    #[arg(long, value_enum)]
    kind: ReportKind,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest squeezing gain in the sensitivity sweep
    #[arg(long, default_value_t = 2.0)]
    r_max: f64,
    /// Number of gain samples in the sensitivity sweep
    #[arg(long, default_value_t = 21)]
    r_steps: usize,
    /// Coherent seed amplitude for the sweep; repeat for several
    #[arg(long = "beta")]
    betas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    /// Full setup comparison as JSON with inputs echoed
    Design,
    /// Phase-sensitivity sweep over squeezing gain as CSV
    Metrology,
    /// Condensed three-column text table of the setup comparison
    Table1,
}

#[derive(Args)]
pub struct OracleArgs {
    /// Grid points per axis over transmittance magnitude and phase
    #[arg(long, default_value_t = 10)]
    grid: usize,
    /// Perturb one closed form to prove the check can fail
    #[arg(long, hide = true)]
    inject_bug: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate::run(&args),
        Command::Reconstruct(args) => reconstruct::run(&args),
        Command::Report(args) => report::run(&args),
        Command::OracleCheck(args) => oracle::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
