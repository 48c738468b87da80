//! Quasi-probability reconstruction from a sampled quasi-characteristic function.
//!
//! Only `λ ≥ 0` is measured. The transform uses `G(−λ) = conj G(λ)`, so
//!
//! `P(Δ) = (Δλ/2π) [Re G0 + 2 Σ_{k≥1} Re(e^{−iλ_k Δ} G_k)]`
//!
//! is real by construction. `G` has period `2π/Δλ` in Δ after sampling, and
//! the spectrum of the protocol lies on the integers `−3..=3`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qndm::QuasiCharacteristic;

pub const DEFAULT_N_SIGMA: f64 = 3.0;
pub const DEFAULT_DELTA_MAX: f64 = 3.0;
/// Negativity tolerance when the noise floor is zero.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Half width of the window that collects one integer peak.
pub const PEAK_HALF_WIDTH: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiProbability {
    pub delta_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `σ_P` of the source sweep.
    pub noise_floor: f64,
    pub d_delta: f64,
    /// `Σ values · dΔ`
    pub integral: f64,
}

/// `−4, −3.99, ..., 4`
pub fn default_delta_grid() -> Vec<f64> {
    (0..=800).map(|k| (k as f64 - 400.0) * 0.01).collect()
}

/// Odd-sized grid spanning one full alias period `2π/Δλ`, centred on 0.
///
/// With more points than the sweep has non-zero λ values, the Riemann sum of
/// `P` over this grid equals `Re G0` up to round-off.
pub fn full_period_delta_grid(gc: &QuasiCharacteristic) -> Vec<f64> {
    let k = gc.len().saturating_sub(1);
    let m = 2 * k + 1;
    let step = TAU / (gc.delta_lambda * m as f64);
    let half = (m / 2) as f64;
    (0..m).map(|j| (j as f64 - half) * step).collect()
}

fn grid_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::Config("Δ grid needs at least 2 points".into()));
    }
    let step = grid[1] - grid[0];
    if !(step > 0.0) {
        return Err(Error::Config("Δ grid must be increasing".into()));
    }
    let tol = 1e-9 * step;
    for (j, &d) in grid.iter().enumerate() {
        if (d - (grid[0] + j as f64 * step)).abs() > tol * (j as f64).max(1.0) {
            return Err(Error::Config(format!("non-uniform Δ grid at index {j}")));
        }
    }
    Ok(step)
}

fn density_at(gc: &QuasiCharacteristic, delta: f64) -> f64 {
    let tail: f64 = gc
        .lambdas
        .iter()
        .zip(&gc.values)
        .skip(1)
        .map(|(&l, g)| (Complex64::from_polar(1.0, -l * delta) * g).re)
        .sum();
    gc.delta_lambda / TAU * (gc.values[0].re + 2.0 * tail)
}

/// Discrete inverse transform of `gc` on `delta_grid`.
pub fn inverse_qpd(gc: &QuasiCharacteristic, delta_grid: &[f64]) -> Result<QuasiProbability> {
    gc.check_uniform()?;
    let d_delta = grid_step(delta_grid)?;
    let values: Vec<f64> = delta_grid.par_iter().map(|&d| density_at(gc, d)).collect();
    let integral = values.iter().sum::<f64>() * d_delta;
    Ok(QuasiProbability {
        delta_grid: delta_grid.to_vec(),
        values,
        noise_floor: noise_floor(gc),
        d_delta,
        integral,
    })
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `σ_P = Δλ · median σ_G`, with `σ_G` the per-point RMS of the two quadrature errors.
pub fn noise_floor(gc: &QuasiCharacteristic) -> f64 {
    gc.delta_lambda * median(&gc.std_errors())
}

/// Largest λ step that does not alias a spectrum confined to `|Δ| ≤ delta_max`.
pub fn nyquist_max_spacing(delta_max: f64) -> Result<f64> {
    if !(delta_max > 0.0) {
        return Err(Error::Config(format!("Δ_max = {delta_max} must be positive")));
    }
    Ok(TAU / (2.0 * delta_max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NegativityVerdict {
    pub violated: bool,
    pub min_value: f64,
    pub min_location: f64,
    pub noise_floor: f64,
    pub threshold: f64,
}

/// Flags a violation when the minimum of `P` over `|Δ| ≤ delta_max` lies below
/// `−n_sigma · σ_P` (below `−1e-9` for exact inputs).
pub fn detect_negativity(qpd: &QuasiProbability, n_sigma: f64, delta_max: f64) -> Result<NegativityVerdict> {
    if !(n_sigma > 0.0) {
        return Err(Error::Config(format!("n_sigma = {n_sigma} must be positive")));
    }
    let slack = 1e-9 * qpd.d_delta;
    let (min_location, min_value) = qpd
        .delta_grid
        .iter()
        .zip(&qpd.values)
        .filter(|(d, _)| d.abs() <= delta_max + slack)
        .map(|(&d, &v)| (d, v))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::EmptyData(format!("no Δ grid points within |Δ| <= {delta_max}")))?;
    let threshold = if qpd.noise_floor > 0.0 {
        n_sigma * qpd.noise_floor
    } else {
        EXACT_TOLERANCE
    };
    Ok(NegativityVerdict {
        violated: min_value < -threshold,
        min_value,
        min_location,
        noise_floor: qpd.noise_floor,
        threshold,
    })
}

/// Riemann-sum weight of `P` in `[n − 1/2, n + 1/2)` for every integer `n` the grid touches.
pub fn peak_weights(qpd: &QuasiProbability) -> BTreeMap<i64, f64> {
    let mut out = BTreeMap::new();
    for (&d, &v) in qpd.delta_grid.iter().zip(&qpd.values) {
        let n = (d + PEAK_HALF_WIDTH + 1e-9 * qpd.d_delta).floor() as i64;
        *out.entry(n).or_insert(0.0) += v * qpd.d_delta;
    }
    out
}

/// Exact integral of the continuous reconstruction over `[n − 1/2, n + 1/2)`
/// for each `n` in `centers`, independent of any Δ grid.
pub fn window_weights(gc: &QuasiCharacteristic, centers: impl IntoIterator<Item = i64>) -> Result<BTreeMap<i64, f64>> {
    gc.check_uniform()?;
    let h = PEAK_HALF_WIDTH;
    Ok(centers
        .into_iter()
        .map(|n| {
            let (a, b) = (n as f64 - h, n as f64 + h);
            let tail: f64 = gc
                .lambdas
                .iter()
                .zip(&gc.values)
                .skip(1)
                .map(|(&l, g)| {
                    // ∫_a^b e^{−iλΔ} dΔ
                    let i = (Complex64::from_polar(1.0, -l * a) - Complex64::from_polar(1.0, -l * b)) / Complex64::new(0.0, l);
                    (i * g).re
                })
                .sum();
            (n, gc.delta_lambda / TAU * (gc.values[0].re * (b - a) + 2.0 * tail))
        })
        .collect())
}

/// `Σ w_n e^{iλn}`: the characteristic function of integer weights.
pub fn forward_from_weights(weights: &BTreeMap<i64, f64>, lambda: f64) -> Complex64 {
    weights
        .iter()
        .map(|(&n, &w)| Complex64::from_polar(w, lambda * n as f64))
        .sum()
}

/// Locations of the global minimum and maximum of `P`.
pub fn extrema(qpd: &QuasiProbability) -> (f64, f64) {
    let pick = |better: fn(f64, f64) -> bool| {
        let mut best = 0;
        for (j, &v) in qpd.values.iter().enumerate() {
            if better(v, qpd.values[best]) {
                best = j;
            }
        }
        qpd.delta_grid[best]
    };
    (pick(|a, b| a < b), pick(|a, b| a > b))
}
