//! Runs one configured experiment and writes its artifacts.
//!
//! Files are staged in a temporary directory inside `out_dir` and moved into
//! place only after every table has been computed, so a failed run leaves no
//! partial output behind.

use std::fs;
use std::path::{Path, PathBuf};

use mrviol_core::lg::{scan_violation, ScanSettings, ViolationScan, CLASSICAL_BOUND};
use mrviol_core::qndm::{sweep_g, QuasiCharacteristic};
use mrviol_core::sim::NoiseModel;
use mrviol_core::spectral::{default_delta_grid, detect_negativity, inverse_qpd, window_weights, QuasiProbability, DEFAULT_DELTA_MAX};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::output::{g_lambda_csv, k3_scan_csv, qpd_csv, summary_json, LgVerdict, QndmSummary, Summary, SCHEMA_VERSION};
use crate::plot::{render, Chart, Series};
use crate::resources::resource_report;

pub const SUMMARY_FILE: &str = "summary.json";
pub const K3_FILE: &str = "k3_scan.csv";
pub const G_FILE: &str = "g_lambda.csv";
pub const QPD_FILE: &str = "qpd.csv";

/// Integer windows reported as peak weights.
const PEAK_RANGE: std::ops::RangeInclusive<i64> = -4..=4;

#[derive(Debug)]
pub struct RunReport {
    pub summary: Summary,
    /// Files now present in `out_dir`.
    pub files: Vec<PathBuf>,
    /// Non-fatal problems, already printed to stderr.
    pub warnings: Vec<String>,
}

struct Artifact {
    name: &'static str,
    text: String,
    /// Plots are optional: failing to produce one only warns.
    optional: bool,
}

struct LgOutcome {
    scan: ViolationScan,
}

struct QndmOutcome {
    gc: QuasiCharacteristic,
    qpd: QuasiProbability,
    summary: QndmSummary,
}

fn run_lg(config: &ExperimentConfig, noise: Option<&NoiseModel>) -> Result<LgOutcome> {
    let settings = ScanSettings {
        shots: config.shots,
        n_reps: config.n_reps,
        n_sigma: config.n_sigma_lg,
        noise,
        seed: config.seed,
    };
    Ok(LgOutcome {
        scan: scan_violation(&config.lg_grid(), &settings)?,
    })
}

fn run_qndm(config: &ExperimentConfig, noise: Option<&NoiseModel>) -> Result<QndmOutcome> {
    let omega_tau = config.qndm_omega_tau()?;
    let gc = sweep_g(omega_tau, config.lambda_max, config.delta_lambda, config.shots, config.seed, noise)?;
    let qpd = inverse_qpd(&gc, &default_delta_grid())?;
    let verdict = detect_negativity(&qpd, config.n_sigma_qpd, DEFAULT_DELTA_MAX)?;
    let summary = QndmSummary {
        omega_tau,
        n_lambda_points: gc.len(),
        noise_floor: qpd.noise_floor,
        integral: qpd.integral,
        peak_weights: window_weights(&gc, PEAK_RANGE)?,
        verdict,
    };
    Ok(QndmOutcome { gc, qpd, summary })
}

fn k3_chart(scan: &ViolationScan) -> Chart<'_> {
    Chart {
        title: "K3 scan",
        x_label: "omega tau",
        y_label: "K3",
        series: vec![Series {
            label: "K3",
            color: "steelblue",
            points: scan.points.iter().map(|p| (p.omega_tau, p.k3.value)).collect(),
            band: Some(
                scan.points
                    .iter()
                    .map(|p| (p.omega_tau, p.k3.value - p.k3.std_error, p.k3.value + p.k3.std_error))
                    .collect(),
            ),
        }],
        rules: vec![CLASSICAL_BOUND],
    }
}

fn g_chart(gc: &QuasiCharacteristic) -> Chart<'_> {
    let pts = |f: fn(&mrviol_core::Complex64) -> f64| gc.lambdas.iter().zip(&gc.values).map(|(&l, v)| (l, f(v))).collect();
    Chart {
        title: "G(lambda)",
        x_label: "lambda",
        y_label: "G",
        series: vec![
            Series {
                label: "Re G",
                color: "steelblue",
                points: pts(|v| v.re),
                band: None,
            },
            Series {
                label: "Im G",
                color: "darkorange",
                points: pts(|v| v.im),
                band: None,
            },
        ],
        rules: vec![0.0],
    }
}

fn qpd_chart(qpd: &QuasiProbability) -> Chart<'_> {
    Chart {
        title: "Quasi-probability",
        x_label: "Delta",
        y_label: "P",
        series: vec![Series {
            label: "P",
            color: "steelblue",
            points: qpd.delta_grid.iter().copied().zip(qpd.values.iter().copied()).collect(),
            band: None,
        }],
        rules: vec![0.0],
    }
}

fn warn(warnings: &mut Vec<String>, msg: String) {
    eprintln!("warning: {msg}");
    warnings.push(msg);
}

fn plot(name: &'static str, chart: &Chart, out: &mut Vec<Artifact>, warnings: &mut Vec<String>) {
    match render(chart) {
        Ok(text) => out.push(Artifact { name, text, optional: true }),
        Err(e) => warn(warnings, format!("skipping {name}: {}", e.0)),
    }
}

fn compute(config: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<(Summary, Vec<Artifact>)> {
    let noise = config.noise.resolve()?;
    let lg = config.mode.runs_lg().then(|| run_lg(config, noise.as_ref())).transpose()?;
    let qndm = config.mode.runs_qndm().then(|| run_qndm(config, noise.as_ref())).transpose()?;

    let mut artifacts = Vec::new();
    if let Some(o) = &lg {
        artifacts.push(Artifact { name: K3_FILE, text: k3_scan_csv(&o.scan), optional: false });
        plot("k3.svg", &k3_chart(&o.scan), &mut artifacts, warnings);
    }
    if let Some(o) = &qndm {
        artifacts.push(Artifact { name: G_FILE, text: g_lambda_csv(&o.gc), optional: false });
        artifacts.push(Artifact { name: QPD_FILE, text: qpd_csv(&o.qpd), optional: false });
        plot("g_lambda.svg", &g_chart(&o.gc), &mut artifacts, warnings);
        plot("qpd.svg", &qpd_chart(&o.qpd), &mut artifacts, warnings);
    }
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        resources: resource_report(config),
        lg: lg.as_ref().map(|o| LgVerdict::from_scan(&o.scan)),
        qndm: qndm.map(|o| o.summary),
    };
    artifacts.push(Artifact { name: SUMMARY_FILE, text: summary_json(&summary)?, optional: false });
    Ok((summary, artifacts))
}

fn stage(dir: &Path, artifacts: &[Artifact], warnings: &mut Vec<String>) -> Result<Vec<&'static str>> {
    let mut staged = Vec::new();
    for a in artifacts {
        match fs::write(dir.join(a.name), &a.text) {
            Ok(()) => staged.push(a.name),
            Err(e) if a.optional => warn(warnings, format!("could not write {}: {e}", a.name)),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(staged)
}

fn commit(
    staging: &Path,
    out_dir: &Path,
    names: &[&'static str],
    artifacts: &[Artifact],
    warnings: &mut Vec<String>,
) -> std::result::Result<Vec<PathBuf>, (HarnessError, Vec<PathBuf>)> {
    let mut moved = Vec::new();
    // required files first, so a failure there is not preceded by plots
    let mut order: Vec<&Artifact> = artifacts.iter().filter(|a| names.contains(&a.name)).collect();
    order.sort_by_key(|a| a.optional);
    for a in order {
        let dest = out_dir.join(a.name);
        match fs::rename(staging.join(a.name), &dest) {
            Ok(()) => moved.push(dest),
            Err(e) if a.optional => warn(warnings, format!("could not place {}: {e}", dest.display())),
            Err(e) => return Err((e.into(), moved)),
        }
    }
    Ok(moved)
}

fn run_in_dir(config: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<RunReport> {
    let out_dir = &config.out_dir;
    let existed = out_dir.exists();
    fs::create_dir_all(out_dir)?;
    let cleanup = |moved: &[PathBuf]| {
        if existed {
            for p in moved {
                let _ = fs::remove_file(p);
            }
        } else {
            let _ = fs::remove_dir_all(out_dir);
        }
    };

    let staging = match tempfile::Builder::new().prefix(".staging-").tempdir_in(out_dir) {
        Ok(d) => d,
        Err(e) => {
            cleanup(&[]);
            return Err(e.into());
        }
    };
    let result = compute(config, warnings)
        .and_then(|(summary, artifacts)| stage(staging.path(), &artifacts, warnings).map(|n| (summary, artifacts, n)));
    let (summary, artifacts, names) = match result {
        Ok(r) => r,
        Err(e) => {
            drop(staging);
            cleanup(&[]);
            return Err(e);
        }
    };
    match commit(staging.path(), out_dir, &names, &artifacts, warnings) {
        Ok(files) => Ok(RunReport {
            summary,
            files,
            warnings: std::mem::take(warnings),
        }),
        Err((e, moved)) => {
            drop(staging);
            cleanup(&moved);
            Err(e)
        }
    }
}

/// Runs `config` on `workers` threads (all cores when `None`).
///
/// Output bytes do not depend on the worker count.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<RunReport> {
    config.validate()?;
    if workers == Some(0) {
        return Err(HarnessError::Config("workers must be at least 1".into()));
    }
    let mut warnings = Vec::new();
    match workers {
        None => run_in_dir(config, &mut warnings),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
            pool.install(|| run_in_dir(config, &mut warnings))
        }
    }
}
