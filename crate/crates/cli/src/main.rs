//! `paik`: command-line front end for the receive-chain model.
//!
//! Every subcommand reads one JSON config, writes its outputs plus a
//! `manifest.json` into `--out`, and exits 0 on success, 2 on a config
//! error, 3 on a numerical singularity and 1 on any other failure.

mod commands;
mod error;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "paik", version, about = "Photoacoustic receive-chain model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Flags {
    /// JSON config describing the chain (and optionally a sweep).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Frequency grid as `fmin,fmax,n` in Hz.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<paik_core::response::FrequencyGrid>,

    /// Sampling rate for impulse responses, Hz.
    #[arg(long, global = true)]
    pub fs: Option<f64>,

    /// Quantity evaluated per sweep cell.
    #[arg(long, global = true, value_enum)]
    pub metric: Option<MetricKind>,

    /// Write SVG plots (default).
    #[arg(long, global = true, overrides_with = "no_plot")]
    pub plot: bool,

    /// Skip SVG plots.
    #[arg(long = "no-plot", global = true, overrides_with = "plot")]
    pub no_plot: bool,

    /// Seed for jittered synthetic resonance fits.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    /// |H1| at the sweep frequency.
    H1,
    /// Peak pressure-referred |H2| and its -6 dB band.
    H2Band,
    /// Tone SNR at the sweep frequency for 1 Pa.
    Snr,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Pressure-referred response on a frequency grid.
    FreqResponse,
    /// Real impulse response from the chain's spectrum.
    Impulse,
    /// Sensitivity sweep over the axes in the config's `sweep` block.
    Sweep,
    /// Noise PSD at the receiver.
    Noise,
    /// Radial-mode table and optional jittered diameter fit.
    Resonance {
        /// Shear velocity of the plate, m/s.
        #[arg(long, default_value_t = 1568.0)]
        v_shear: f64,
        /// Number of radial modes to list.
        #[arg(long, default_value_t = 5)]
        modes: usize,
        /// Relative jitter of the synthetic fundamentals.
        #[arg(long, default_value_t = 0.05)]
        jitter: f64,
    },
    /// Analytic-identity checks on the configured chain.
    Validate,
}

fn parse_grid(s: &str) -> std::result::Result<paik_core::response::FrequencyGrid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected fmin,fmax,n, got `{s}`"));
    };
    let lo: f64 = lo.parse().map_err(|e| format!("fmin: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("fmax: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("n: {e}"))?;
    paik_core::response::FrequencyGrid::new(lo, hi, n).map_err(|e| e.to_string())
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("PAIK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Flag(format!("PAIK_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Flag(format!("cannot size worker pool: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match configure_threads().and_then(|_| commands::run(&cli.command, &cli.flags)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
