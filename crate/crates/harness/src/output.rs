//! CSV tables and the JSON run summary.

use std::collections::BTreeMap;
use std::path::Path;

use mrviol_core::lg::ViolationScan;
use mrviol_core::qndm::QuasiCharacteristic;
use mrviol_core::spectral::{NegativityVerdict, QuasiProbability};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::resources::ResourceReport;

pub const SCHEMA_VERSION: &str = "1";
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 <= |x| < 1e12`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv<I: IntoIterator<Item = Vec<String>>>(header: &[&str], rows: I) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn k3_scan_csv(scan: &ViolationScan) -> String {
    let f = format_float;
    csv(
        &["omega_tau", "k1", "k1_err", "k2", "k2_err", "k3", "k3_err", "violated"],
        scan.points.iter().map(|p| {
            vec![
                f(p.omega_tau),
                f(p.k1.value),
                f(p.k1.std_error),
                f(p.k2.value),
                f(p.k2.std_error),
                f(p.k3.value),
                f(p.k3.std_error),
                p.violated_k3.to_string(),
            ]
        }),
    )
}

pub fn g_lambda_csv(gc: &QuasiCharacteristic) -> String {
    let f = format_float;
    csv(
        &["lambda", "re", "re_err", "im", "im_err"],
        (0..gc.len()).map(|k| {
            vec![
                f(gc.lambdas[k]),
                f(gc.values[k].re),
                f(gc.re_errors[k]),
                f(gc.values[k].im),
                f(gc.im_errors[k]),
            ]
        }),
    )
}

pub fn qpd_csv(qpd: &QuasiProbability) -> String {
    csv(
        &["delta", "value"],
        qpd.delta_grid
            .iter()
            .zip(&qpd.values)
            .map(|(&d, &v)| vec![format_float(d), format_float(v)]),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LgVerdict {
    /// Whether any grid point shows a confident K3 violation.
    pub violated: bool,
    pub confident_fraction: f64,
    pub n_points: usize,
    pub n_violated: usize,
    pub n_sigma: f64,
    pub max_k3: f64,
    pub max_k3_location: f64,
}

impl LgVerdict {
    pub fn from_scan(scan: &ViolationScan) -> Self {
        let n_violated = scan.points.iter().filter(|p| p.violated_k3).count();
        let best = scan
            .points
            .iter()
            .max_by(|a, b| a.k3.value.total_cmp(&b.k3.value))
            .expect("scan has at least one point");
        Self {
            violated: n_violated > 0,
            confident_fraction: scan.confident_fraction,
            n_points: scan.points.len(),
            n_violated,
            n_sigma: scan.n_sigma,
            max_k3: best.k3.value,
            max_k3_location: best.omega_tau,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QndmSummary {
    pub omega_tau: f64,
    pub n_lambda_points: usize,
    pub noise_floor: f64,
    /// Riemann sum of the density over the reported Δ grid.
    pub integral: f64,
    /// Integrated weight in `[n − 1/2, n + 1/2)`.
    pub peak_weights: BTreeMap<i64, f64>,
    pub verdict: NegativityVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: &'static str,
    pub config: ExperimentConfig,
    pub resources: ResourceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lg: Option<LgVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qndm: Option<QndmSummary>,
}

pub fn summary_json(summary: &Summary) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summary)?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}
