use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qrms_core::estimators::{Method, ReadoutMode};
use qrms_core::harness::{Format, HarnessConfig};
use qrms_core::mitigation::{Extrapolator, Mitigation};
use qrms_core::Pauli;

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "qrms",
    version,
    about = "Measure and estimate the QRMS disturbance of qubit measurements"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalArgs {
    /// TOML file with default values for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Base seed; iteration i uses seed + i
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    shots: Option<u64>,

    #[arg(long, global = true)]
    iterations: Option<usize>,

    /// `none`, `synthetic`, or a TOML noise file
    #[arg(long, global = true)]
    noise: Option<String>,

    /// Directory for output files; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// csv, jsonl or text
    #[arg(long, global = true)]
    format: Option<Format>,

    /// Report SD, bias and RMSE in units of 1e-3
    #[arg(long, global = true)]
    milli: bool,

    /// Use exact outcome probabilities instead of sampling
    #[arg(long, global = true)]
    analytic: bool,
}

impl GlobalArgs {
    fn as_config(&self) -> HarnessConfig {
        HarnessConfig {
            seed: self.seed,
            shots: self.shots,
            iterations: self.iterations,
            noise: self.noise.clone(),
            out: self.out.clone(),
            format: self.format,
            milli: self.milli.then_some(true),
            analytic: self.analytic.then_some(true),
            ..HarnessConfig::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact disturbance figures for the standard fixtures
    Exact {
        #[arg(long, value_delimiter = ',')]
        measured: Option<Vec<Pauli>>,
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Three-state method
    Tsm(EstimatorArgs),
    /// Weak-measurement method
    Wmm(EstimatorArgs),
    /// Decoherence method
    Dec(EstimatorArgs),
    /// Every method on every fixture
    Table {
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        #[arg(long, value_delimiter = ',')]
        measured: Option<Vec<Pauli>>,
        #[arg(long, value_delimiter = ',')]
        mitigation: Option<Vec<Mitigation>>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        theta_w: Option<f64>,
        #[command(flatten)]
        zne: ZneArgs,
    },
    /// Decoherence method over a grid of coupling angles
    SweepTheta(SweepArgs),
    /// Weak-measurement method over a grid of weak angles
    SweepThetaw(SweepArgs),
    /// Detector tomography of the readout
    Calibrate {
        /// Wires to calibrate
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        wires: Vec<usize>,
        /// Calibrate each wire separately and combine
        #[arg(long)]
        tensored: bool,
    },
    /// One estimator with readout mitigation and/or extrapolation
    Mitigate {
        #[command(flatten)]
        est: EstimatorArgs,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value = "rem+zne")]
        mode: Mitigation,
        /// Confusion matrix CSV over the estimator's read wires
        #[arg(long)]
        calibration: Option<PathBuf>,
        #[arg(long)]
        calibration_shots: Option<u64>,
        #[command(flatten)]
        zne: ZneArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct EstimatorArgs {
    #[arg(long, default_value = "Z")]
    measured: Pauli,
    /// Disturbed observable
    #[arg(long, default_value = "X")]
    b: Pauli,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    theta_w: Option<f64>,
    /// Estimate from `<X>` of the probe instead of its projection
    #[arg(long)]
    probe_x: bool,
}

impl EstimatorArgs {
    fn readout_mode(&self) -> ReadoutMode {
        if self.probe_x {
            ReadoutMode::ProbeX
        } else {
            ReadoutMode::ProbeProjection
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
struct ZneArgs {
    /// Odd noise scale factors
    #[arg(long, value_delimiter = ',')]
    scale_factors: Option<Vec<u32>>,
    #[arg(long)]
    extrapolator: Option<Extrapolator>,
    #[arg(long)]
    repeats: Option<usize>,
    /// TOML schedule file
    #[arg(long)]
    zne_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    #[arg(long, default_value = "Z")]
    measured: Pauli,
    /// Comma-separated grid, strictly increasing
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long)]
    mitigation: Option<Mitigation>,
    #[arg(long)]
    probe_x: bool,
    #[command(flatten)]
    zne: ZneArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
