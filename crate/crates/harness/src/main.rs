use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mrviol::{resolve, run_experiment, FileConfig, Mode, Overrides};

/// Leggett-Garg scans and detector-based quasi-probability runs.
#[derive(Debug, Parser)]
#[command(name = "mrviol", version)]
struct Cli {
    #[arg(value_enum)]
    mode: Mode,
    /// Single value, or `start:stop:n` for n points on [start, stop)
    #[arg(long, allow_hyphen_values = true)]
    omega_tau: Option<String>,
    #[arg(long)]
    shots: Option<u64>,
    /// Repetitions per grid point for the LG scan
    #[arg(long)]
    reps: Option<usize>,
    /// λ step of the detector sweep
    #[arg(long)]
    dlambda: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    /// `none`, `nisq-default` or a path to a TOML noise file
    #[arg(long)]
    noise: Option<String>,
    /// Confidence multiplier for the LG verdict
    #[arg(long)]
    n_sigma: Option<f64>,
    /// Confidence multiplier for the negativity verdict
    #[arg(long)]
    n_sigma_qpd: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Flat TOML file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        omega_tau: cli.omega_tau,
        shots: cli.shots,
        n_reps: cli.reps,
        delta_lambda: cli.dlambda,
        lambda_max: cli.lambda_max,
        n_sigma_lg: cli.n_sigma,
        n_sigma_qpd: cli.n_sigma_qpd,
        noise: cli.noise,
        seed: cli.seed,
        out_dir: cli.out_dir,
    };
    let result = cli
        .config
        .as_deref()
        .map(FileConfig::load)
        .transpose()
        .and_then(|file| resolve(cli.mode, file, overrides))
        .and_then(|config| run_experiment(&config, cli.workers));
    match result {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mrviol: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
