//! `cri` — experiment harness for the cognitive-radio interference toolkit.
//!
//! Reads a flat key-value scenario config, runs one of the preset
//! experiments, and writes plot-ready CSV plus a manifest that pins every
//! resolved parameter and the master seed. Reruns with the same manifest
//! inputs produce byte-identical outputs.

mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use thiserror::Error;

use cri_core::config::ScenarioConfig;
use output::OutputDir;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("numerical: {0}")]
    Convergence(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Convergence(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<cri_core::Error> for CliError {
    fn from(e: cri_core::Error) -> Self {
        match e {
            cri_core::Error::Convergence(m) => CliError::Convergence(m),
            cri_core::Error::Inconsistency(m) => CliError::Convergence(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cri",
    version,
    about = "Aggregate cognitive-radio interference experiments",
    disable_help_subcommand = true
)]
struct Cli {
    /// Scenario config file (flat key = value text); defaults apply if absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV files and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the config's master seed.
    #[arg(long, global = true)]
    master_seed: Option<u64>,

    /// Override the config's replication count.
    #[arg(long, global = true)]
    replications: Option<u64>,

    /// Cap the worker thread count (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic vs simulated interference CDFs over the propagation grid.
    Cdf,
    /// Exact moments, skewness, and the two-moment lognormal fit.
    Moments,
    /// Third-moment mismatch report over the gamma >= 3 grid.
    Skewness,
    /// Calibrate transmit scales and confirm them by Monte Carlo.
    Calibrate,
    /// Exclusion-radius sweep over sigma (or over R/Rc ratios).
    Pez {
        /// Comma-separated R/Rc ratios to sweep instead of sigma.
        #[arg(long, value_delimiter = ',')]
        rc_ratios: Vec<f64>,
    },
    /// Admitted-count distributions for the REM schemes.
    Rem,
    /// Percentage of CRs admitted per scheme at both densities.
    AccessCompare,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cdf => "cdf",
            Command::Moments => "moments",
            Command::Skewness => "skewness",
            Command::Calibrate => "calibrate",
            Command::Pez { .. } => "pez",
            Command::Rem => "rem",
            Command::AccessCompare => "access-compare",
        }
    }

    /// Replication count used when neither the config nor the command line
    /// pins one: 10^6 samples for the CDF comparison, 10^5 for reliability
    /// estimates, 10^4 for admission-count experiments.
    fn default_replications(&self) -> u64 {
        match self {
            Command::Cdf => 1_000_000,
            Command::Calibrate => 100_000,
            _ => 10_000,
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            ScenarioConfig::parse_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.master_seed {
        cfg.master_seed = seed;
    }
    if let Some(reps) = cli.replications {
        cfg.replications = Some(reps);
    }
    if cfg.replications.is_none() {
        cfg.replications = Some(cli.command.default_replications());
    }
    Ok(cfg)
}

fn write_manifest(cli: &Cli, cfg: &ScenarioConfig, out: &OutputDir) -> Result<(), CliError> {
    let manifest = format!(
        "# cri run manifest\ntool_version = {}\nsubcommand = {}\nconfig_path = {}\nworkers = {}\n{}",
        env!("CARGO_PKG_VERSION"),
        cli.command.name(),
        cli.config
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "(defaults)".into()),
        cli.workers
            .map(|w| w.to_string())
            .unwrap_or_else(|| "(default)".into()),
        cfg.render()
    );
    out.write_file("manifest.txt", &manifest)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    }
    let cfg = load_config(cli)?;
    let out = OutputDir::create(&cli.out)?;
    write_manifest(cli, &cfg, &out)?;
    match &cli.command {
        Command::Cdf => experiments::run_cdf_compare(&cfg, &out),
        Command::Moments => experiments::run_moments(&cfg, &out),
        Command::Skewness => experiments::run_skewness_report(&cfg, &out),
        Command::Calibrate => experiments::run_calibrate(&cfg, &out),
        Command::Pez { rc_ratios } => experiments::run_pez_sweep(&cfg, &out, rc_ratios),
        Command::Rem => experiments::run_rem_cdf(&cfg, &out),
        Command::AccessCompare => experiments::run_access_compare(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("cri: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cri: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
