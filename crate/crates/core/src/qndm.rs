//! Non-demolition detector protocol.
//!
//! The detector starts in `(|0> + |1>)/√2` and couples to the system through
//! `exp(i λ/2 σz⊗σz)` at `t = 0, τ, 2τ`. The system then sits on a branch of
//! detector-conditioned evolutions `V(±λ)`, and the detector coherence
//!
//! `G(λ) = 2 <1D| Tr_S ρ |0D> = <V(λ)ψ | V(−λ)ψ>`
//!
//! is the quasi-characteristic function, normalised so that `G(0) = 1`. With
//! this orientation the quasi-probability obtained by the inverse transform
//! `∫ e^{−iλΔ} G(λ) dλ / 2π` puts positive weight on the accumulated outcome
//! `Δ = a0 + a1 + a2` of a trajectory `(a0, a1, a2)` when the drive is off.
//!
//! Readout: `Re G = p0 − p1` after H on the detector, `Im G = p1 − p0` after
//! `U2(π/2, −π/2)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::{float_tag, rng_for};
use crate::sim::decompose::{evolution, initial_state, interaction};
use crate::sim::{outcome_distribution, sample_counts, Circuit, GateOp, NoiseModel};
use crate::{DETECTOR, SYSTEM};

/// Relative tolerance on the λ spacing of a uniform grid.
pub const GRID_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QndmPart {
    RealPart,
    ImagPart,
}

impl QndmPart {
    fn tag(self) -> u64 {
        match self {
            QndmPart::RealPart => 0,
            QndmPart::ImagPart => 1,
        }
    }

    /// Quadrature from the detector marginal `p1`.
    fn quadrature(self, p1: f64) -> f64 {
        match self {
            QndmPart::RealPart => 1.0 - 2.0 * p1,
            QndmPart::ImagPart => 2.0 * p1 - 1.0,
        }
    }

    fn readout(self) -> GateOp {
        match self {
            QndmPart::RealPart => GateOp::h(DETECTOR),
            QndmPart::ImagPart => GateOp::u2(DETECTOR, FRAC_PI_2, -FRAC_PI_2),
        }
    }
}

/// Two-qubit circuit whose single detector measurement estimates one quadrature of `G(λ)`.
pub fn build_qndm_circuit(lambda: f64, omega_tau: f64, part: QndmPart) -> Circuit {
    let mut c = Circuit::new(2);
    c.extend(initial_state(SYSTEM, FRAC_PI_2, FRAC_PI_2));
    c.push(GateOp::h(DETECTOR));
    let couple = interaction(SYSTEM, DETECTOR, lambda);
    let step = evolution(SYSTEM, omega_tau / 2.0);
    c.extend(couple.clone());
    c.extend(step.clone());
    c.extend(couple.clone());
    c.extend(step);
    c.extend(couple);
    c.push(part.readout());
    c.measure(DETECTOR);
    c
}

type Mat2 = [[Complex64; 2]; 2];

fn mul(a: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

/// `V(λ) ψ` for one detector branch, from closed-form 2x2 matrices.
fn branch(lambda: f64, omega_tau: f64) -> [Complex64; 2] {
    let a = omega_tau / 2.0;
    let drive: Mat2 = [
        [Complex64::new(a.cos(), 0.0), Complex64::new(0.0, -a.sin())],
        [Complex64::new(0.0, -a.sin()), Complex64::new(a.cos(), 0.0)],
    ];
    let kick = |v: [Complex64; 2]| [v[0] * Complex64::from_polar(1.0, lambda / 2.0), v[1] * Complex64::from_polar(1.0, -lambda / 2.0)];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = [Complex64::new(s, 0.0), Complex64::new(0.0, s)];
    v = kick(v);
    v = kick(mul(&drive, v));
    kick(mul(&drive, v))
}

/// Noiseless quasi-characteristic function.
pub fn exact_g(lambda: f64, omega_tau: f64) -> Complex64 {
    let plus = branch(lambda, omega_tau);
    let minus = branch(-lambda, omega_tau);
    let overlap = plus[0].conj() * minus[0] + plus[1].conj() * minus[1];
    // both branches are unit vectors; dividing out their rounded norms makes G(0) = 1 exactly
    let norm = |v: &[Complex64; 2]| (v[0].conj() * v[0] + v[1].conj() * v[1]).re;
    overlap / (norm(&plus) * norm(&minus)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GPoint {
    pub value: Complex64,
    pub re_error: f64,
    pub im_error: f64,
}

fn binomial_error(q: f64, shots: u64) -> f64 {
    ((1.0 - q * q).max(0.0) / shots as f64).sqrt()
}

/// Detector marginal `P(1)` for one part; noisy backend when `noise` is given.
pub fn detector_p1(lambda: f64, omega_tau: f64, part: QndmPart, noise: Option<&NoiseModel>) -> Result<f64> {
    let d = outcome_distribution(&build_qndm_circuit(lambda, omega_tau, part), noise)?;
    Ok(d.prob(1))
}

fn sampled_quadrature<R: Rng>(p1: f64, part: QndmPart, shots: u64, rng: &mut R) -> f64 {
    let dist = crate::sim::Distribution::new(1, vec![1.0 - p1, p1]).expect("one-slot distribution");
    let counts = sample_counts(&dist, shots, rng);
    part.quadrature(counts.frequency(1))
}

fn g_point(lambda: f64, omega_tau: f64, shots: u64, seed: u64, noise: Option<&NoiseModel>) -> Result<GPoint> {
    let mut q = [0.0; 2];
    for (slot, part) in q.iter_mut().zip([QndmPart::RealPart, QndmPart::ImagPart]) {
        let p1 = detector_p1(lambda, omega_tau, part, noise)?;
        let mut rng = rng_for(seed, &[float_tag(lambda), part.tag()]);
        *slot = sampled_quadrature(p1, part, shots, &mut rng);
    }
    Ok(GPoint {
        value: Complex64::new(q[0], q[1]),
        re_error: binomial_error(q[0], shots),
        im_error: binomial_error(q[1], shots),
    })
}

/// Shot estimate of `G(λ)`; each part runs `shots` times on its own stream.
pub fn estimate_g_point(lambda: f64, omega_tau: f64, shots: u64, seed: u64, noise: Option<&NoiseModel>) -> Result<GPoint> {
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    if let Some(m) = noise {
        m.validate()?;
    }
    g_point(lambda, omega_tau, shots, seed, noise)
}

/// `G` sampled on `λ_k = k·Δλ`, `k = 0..len`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiCharacteristic {
    pub delta_lambda: f64,
    pub lambdas: Vec<f64>,
    pub values: Vec<Complex64>,
    pub re_errors: Vec<f64>,
    pub im_errors: Vec<f64>,
    /// Zero for exact values.
    pub shots_per_point: u64,
}

impl QuasiCharacteristic {
    /// Noiseless table of `f` on `n_points` grid points.
    pub fn tabulate(delta_lambda: f64, n_points: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let lambdas: Vec<f64> = (0..n_points).map(|k| k as f64 * delta_lambda).collect();
        let values = lambdas.iter().map(|&l| f(l)).collect();
        Self {
            delta_lambda,
            values,
            re_errors: vec![0.0; n_points],
            im_errors: vec![0.0; n_points],
            lambdas,
            shots_per_point: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Per-point RMS of the two quadrature errors.
    pub fn std_errors(&self) -> Vec<f64> {
        self.re_errors
            .iter()
            .zip(&self.im_errors)
            .map(|(r, i)| ((r * r + i * i) / 2.0).sqrt())
            .collect()
    }

    /// Checks that the grid starts at 0 with constant spacing `delta_lambda`.
    pub fn check_uniform(&self) -> Result<()> {
        let n = self.lambdas.len();
        if n == 0 {
            return Err(Error::EmptyData("empty λ grid".into()));
        }
        if self.values.len() != n || self.re_errors.len() != n || self.im_errors.len() != n {
            return Err(Error::Config("λ grid and value columns differ in length".into()));
        }
        if !(self.delta_lambda > 0.0) {
            return Err(Error::Config(format!("Δλ = {} must be positive", self.delta_lambda)));
        }
        let tol = GRID_TOLERANCE * self.delta_lambda.max(1.0);
        if self.lambdas[0].abs() > tol {
            return Err(Error::Config(format!("λ grid starts at {} instead of 0", self.lambdas[0])));
        }
        for w in self.lambdas.windows(2) {
            if ((w[1] - w[0]) - self.delta_lambda).abs() > tol {
                return Err(Error::Config(format!(
                    "non-uniform λ grid: step {} from {} (expected {})",
                    w[1] - w[0],
                    w[0],
                    self.delta_lambda
                )));
            }
        }
        Ok(())
    }
}

/// Number of grid points `0, Δλ, ..., ≤ λ_max`.
pub fn grid_points(lambda_max: f64, delta_lambda: f64) -> Result<usize> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::Config(format!("λ_max = {lambda_max} must be positive")));
    }
    if !(delta_lambda > 0.0) || delta_lambda > lambda_max {
        return Err(Error::Config(format!("Δλ = {delta_lambda} must lie in (0, λ_max]")));
    }
    Ok((lambda_max / delta_lambda + 1e-9).floor() as usize + 1)
}

/// Shot estimates of `G` on the grid, computed in parallel.
///
/// Every `(λ, part)` pair draws from a stream keyed by its λ value, so the
/// result does not depend on evaluation order.
pub fn sweep_g(
    omega_tau: f64,
    lambda_max: f64,
    delta_lambda: f64,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<QuasiCharacteristic> {
    let n = grid_points(lambda_max, delta_lambda)?;
    if shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    if let Some(m) = noise {
        m.validate()?;
    }
    let lambdas: Vec<f64> = (0..n).map(|k| k as f64 * delta_lambda).collect();
    let points = lambdas
        .par_iter()
        .map(|&l| g_point(l, omega_tau, shots, seed, noise))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuasiCharacteristic {
        delta_lambda,
        values: points.iter().map(|p| p.value).collect(),
        re_errors: points.iter().map(|p| p.re_error).collect(),
        im_errors: points.iter().map(|p| p.im_error).collect(),
        lambdas,
        shots_per_point: shots,
    })
}

/// Noiseless `G` on the same grid as [`sweep_g`].
pub fn exact_sweep(omega_tau: f64, lambda_max: f64, delta_lambda: f64) -> Result<QuasiCharacteristic> {
    let n = grid_points(lambda_max, delta_lambda)?;
    Ok(QuasiCharacteristic::tabulate(delta_lambda, n, |l| exact_g(l, omega_tau)))
}

/// Infinite-shot `G` from the noisy backend, on the same grid as [`sweep_g`].
pub fn noisy_exact_sweep(omega_tau: f64, lambda_max: f64, delta_lambda: f64, noise: &NoiseModel) -> Result<QuasiCharacteristic> {
    let n = grid_points(lambda_max, delta_lambda)?;
    noise.validate()?;
    let lambdas: Vec<f64> = (0..n).map(|k| k as f64 * delta_lambda).collect();
    let values = lambdas
        .par_iter()
        .map(|&l| {
            let re = QndmPart::RealPart.quadrature(detector_p1(l, omega_tau, QndmPart::RealPart, Some(noise))?);
            let im = QndmPart::ImagPart.quadrature(detector_p1(l, omega_tau, QndmPart::ImagPart, Some(noise))?);
            Ok(Complex64::new(re, im))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuasiCharacteristic {
        delta_lambda,
        values,
        re_errors: vec![0.0; n],
        im_errors: vec![0.0; n],
        lambdas,
        shots_per_point: 0,
    })
}
