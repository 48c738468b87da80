//! Leggett-Garg protocol: sequential σz measurements at `t_k = k·τ` on the
//! driven system qubit, two-time correlators, and K-string combinations.
//!
//! Outcome encoding: record bit 0 is eigenvalue `+1`, bit 1 is `-1`.

use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::{float_tag, rng_for};
use crate::sim::decompose::{evolution, initial_state};
use crate::sim::{outcome_distribution, sample_counts, Circuit, Distribution, NoiseModel, ShotCounts};
use crate::SYSTEM;

/// Margin above the classical bound that absorbs floating round-off in exact scans.
pub const VIOLATION_EPS: f64 = 1e-12;

/// Macrorealist upper bound shared by K1, K2 and K3.
pub const CLASSICAL_BOUND: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TimePair {
    pub i: usize,
    pub j: usize,
}

impl TimePair {
    pub const P01: Self = Self { i: 0, j: 1 };
    pub const P12: Self = Self { i: 1, j: 2 };
    pub const P02: Self = Self { i: 0, j: 2 };
    /// The three pairs measured by the standard protocol.
    pub const STANDARD: [Self; 3] = [Self::P01, Self::P12, Self::P02];

    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i >= j {
            return Err(Error::Config(format!("time pair ({i}, {j}) must have i < j")));
        }
        Ok(Self { i, j })
    }
}

/// Prepares `(|0> + i|1>)/√2`, measures at `t_i` and at `t_j`.
pub fn build_lg_circuit(pair: TimePair, omega_tau: f64) -> Result<Circuit> {
    if !TimePair::STANDARD.contains(&pair) {
        return Err(Error::Config(format!(
            "pair ({}, {}) is not one of (0,1), (1,2), (0,2)",
            pair.i, pair.j
        )));
    }
    let mut c = Circuit::new(1);
    c.extend(initial_state(SYSTEM, FRAC_PI_2, FRAC_PI_2));
    let step = omega_tau / 2.0;
    for _ in 0..pair.i {
        c.extend(evolution(SYSTEM, step));
    }
    c.measure(SYSTEM);
    for _ in pair.i..pair.j {
        c.extend(evolution(SYSTEM, step));
    }
    c.measure(SYSTEM);
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelatorEstimate {
    pub pair: TimePair,
    pub value: f64,
    pub std_error: f64,
    /// Zero for exact (infinite-shot) values.
    pub shots: u64,
}

/// `Σ a_i a_j P(a_i, a_j)` from a two-slot histogram.
pub fn estimate_correlator(pair: TimePair, counts: &ShotCounts) -> Result<CorrelatorEstimate> {
    if counts.slots() != 2 {
        return Err(Error::Config(format!(
            "correlator needs a 2-measurement record, got {} slots",
            counts.slots()
        )));
    }
    if counts.total() == 0 {
        return Err(Error::EmptyData("no shots recorded".into()));
    }
    let same = counts.count(0b00) + counts.count(0b11);
    let differ = counts.count(0b01) + counts.count(0b10);
    let total = counts.total() as f64;
    let value = (same as f64 - differ as f64) / total;
    Ok(CorrelatorEstimate {
        pair,
        value,
        std_error: ((1.0 - value * value).max(0.0) / total).sqrt(),
        shots: counts.total(),
    })
}

/// Infinite-shot correlator of an exact two-slot distribution.
pub fn exact_correlator(pair: TimePair, dist: &Distribution) -> Result<CorrelatorEstimate> {
    if dist.slots() != 2 {
        return Err(Error::Config("correlator needs a 2-measurement record".into()));
    }
    let p = dist.probs();
    Ok(CorrelatorEstimate {
        pair,
        value: p[0b00] + p[0b11] - p[0b01] - p[0b10],
        std_error: 0.0,
        shots: 0,
    })
}

/// `cos(ω (t_i − t_j))`
pub fn analytic_correlator(omega: f64, ti: f64, tj: f64) -> f64 {
    (omega * (ti - tj)).cos()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KString {
    /// `C12 − C01 + C02`
    K1,
    /// `−C12 − C01 − C02`
    K2,
    /// `C01 + C12 − C02`
    K3,
    /// `C01 + C12 + ... + C(n−2)(n−1) − C0(n−1)` over `n ≥ 3` measurement times.
    Kn(usize),
}

impl KString {
    pub fn terms(&self) -> Result<Vec<(f64, TimePair)>> {
        use TimePair as P;
        Ok(match *self {
            KString::K1 => vec![(1.0, P::P12), (-1.0, P::P01), (1.0, P::P02)],
            KString::K2 => vec![(-1.0, P::P12), (-1.0, P::P01), (-1.0, P::P02)],
            KString::K3 => vec![(1.0, P::P01), (1.0, P::P12), (-1.0, P::P02)],
            KString::Kn(n) => {
                if n < 3 {
                    return Err(Error::Config(format!("K_n needs n >= 3, got {n}")));
                }
                let mut t: Vec<_> = (1..n).map(|k| (1.0, P { i: k - 1, j: k })).collect();
                t.push((-1.0, P { i: 0, j: n - 1 }));
                t
            }
        })
    }
}

/// Signed sum of correlators, errors added in quadrature.
pub fn compute_k_string(correlators: &[CorrelatorEstimate], variant: KString) -> Result<Estimate> {
    let mut value = 0.0;
    let mut var = 0.0;
    for (sign, pair) in variant.terms()? {
        let c = correlators.iter().find(|c| c.pair == pair).ok_or_else(|| {
            Error::Config(format!("{variant:?} needs C{}{}", pair.i, pair.j))
        })?;
        value += sign * c.value;
        var += c.std_error * c.std_error;
    }
    Ok(Estimate {
        value,
        std_error: var.sqrt(),
    })
}

/// K-string of ideal correlators with measurement times `t_k = k·τ`.
pub fn analytic_k_string(variant: KString, omega_tau: f64) -> Result<f64> {
    let terms = variant.terms()?;
    Ok(terms
        .iter()
        .map(|(sign, p)| sign * analytic_correlator(omega_tau, p.i as f64, p.j as f64))
        .sum())
}

pub fn violates(mean: f64, spread: f64, n_sigma: f64) -> bool {
    mean - n_sigma * spread > CLASSICAL_BOUND + VIOLATION_EPS
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LgPoint {
    pub omega_tau: f64,
    pub k1: Estimate,
    pub k2: Estimate,
    /// Mean over repetitions; `std_error` is their sample standard deviation.
    pub k3: Estimate,
    pub violated_k3: bool,
    pub n_reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationScan {
    pub grid: Vec<f64>,
    pub points: Vec<LgPoint>,
    pub confident_fraction: f64,
    pub n_sigma: f64,
}

impl ViolationScan {
    fn from_points(points: Vec<LgPoint>, n_sigma: f64) -> Self {
        let grid: Vec<f64> = points.iter().map(|p| p.omega_tau).collect();
        let hits = points.iter().filter(|p| p.violated_k3).count();
        let confident_fraction = if points.is_empty() {
            0.0
        } else {
            hits as f64 / points.len() as f64
        };
        Self {
            grid,
            points,
            confident_fraction,
            n_sigma,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanSettings<'a> {
    pub shots: u64,
    pub n_reps: usize,
    pub n_sigma: f64,
    pub noise: Option<&'a NoiseModel>,
    pub seed: u64,
}

/// `n` uniform points on `[0, 2π)`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

pub const DEFAULT_GRID_POINTS: usize = 101;

fn mean_and_std(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Estimate {
        value: mean,
        std_error: var.sqrt(),
    }
}

fn standard_distributions(omega_tau: f64, noise: Option<&NoiseModel>) -> Result<Vec<Distribution>> {
    TimePair::STANDARD
        .iter()
        .map(|&p| outcome_distribution(&build_lg_circuit(p, omega_tau)?, noise))
        .collect()
}

fn scan_point(omega_tau: f64, s: &ScanSettings) -> Result<LgPoint> {
    let dists = standard_distributions(omega_tau, s.noise)?;
    let mut ks = [
        Vec::with_capacity(s.n_reps),
        Vec::with_capacity(s.n_reps),
        Vec::with_capacity(s.n_reps),
    ];
    for rep in 0..s.n_reps {
        let correlators = TimePair::STANDARD
            .iter()
            .zip(&dists)
            .enumerate()
            .map(|(idx, (&pair, dist))| {
                let mut rng = rng_for(s.seed, &[float_tag(omega_tau), rep as u64, idx as u64]);
                estimate_correlator(pair, &sample_counts(dist, s.shots, &mut rng))
            })
            .collect::<Result<Vec<_>>>()?;
        for (acc, variant) in ks.iter_mut().zip([KString::K1, KString::K2, KString::K3]) {
            acc.push(compute_k_string(&correlators, variant)?.value);
        }
    }
    let [k1, k2, k3] = ks.map(|v| mean_and_std(&v));
    Ok(LgPoint {
        omega_tau,
        k1,
        k2,
        k3,
        violated_k3: violates(k3.value, k3.std_error, s.n_sigma),
        n_reps: s.n_reps,
    })
}

/// Repeated finite-shot K estimates on every grid point.
///
/// Each repetition samples all three correlator circuits afresh. A point is
/// violated when `mean(K3) − n_sigma · std(K3) > 1`. Streams are keyed by the
/// grid value, so the result does not depend on grid order or thread count.
pub fn scan_violation(grid: &[f64], settings: &ScanSettings) -> Result<ViolationScan> {
    if settings.shots == 0 {
        return Err(Error::Config("shots must be at least 1".into()));
    }
    if settings.n_reps < 2 {
        return Err(Error::Config("a violation scan needs at least 2 repetitions".into()));
    }
    if !(settings.n_sigma >= 0.0) {
        return Err(Error::Config(format!("n_sigma = {} must be non-negative", settings.n_sigma)));
    }
    if let Some(m) = settings.noise {
        m.validate()?;
    }
    let points = grid
        .par_iter()
        .map(|&w| scan_point(w, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(ViolationScan::from_points(points, settings.n_sigma))
}

/// Infinite-shot scan from exact circuit distributions (zero spread).
pub fn scan_exact(grid: &[f64], noise: Option<&NoiseModel>) -> Result<ViolationScan> {
    let points = grid
        .par_iter()
        .map(|&w| {
            let dists = standard_distributions(w, noise)?;
            let correlators = TimePair::STANDARD
                .iter()
                .zip(&dists)
                .map(|(&p, d)| exact_correlator(p, d))
                .collect::<Result<Vec<_>>>()?;
            let k = |v| compute_k_string(&correlators, v);
            let (k1, k2, k3) = (k(KString::K1)?, k(KString::K2)?, k(KString::K3)?);
            Ok(LgPoint {
                omega_tau: w,
                k1,
                k2,
                k3,
                violated_k3: violates(k3.value, 0.0, 0.0),
                n_reps: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ViolationScan::from_points(points, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{exact_probabilities, Event};
    use std::f64::consts::PI;

    #[test]
    fn circuit_shapes() {
        let c01 = build_lg_circuit(TimePair::P01, 0.3).unwrap();
        let c02 = build_lg_circuit(TimePair::P02, 0.3).unwrap();
        assert_eq!(c01.measurement_count(), 2);
        assert_eq!(c02.measurement_count(), 2);
        // 4 prep gates, measure, 3 gates per τ step
        let measure_at = |c: &Circuit| {
            c.events()
                .iter()
                .enumerate()
                .filter(|(_, e)| matches!(e, Event::Measure { .. }))
                .map(|(i, _)| i)
                .collect::<Vec<_>>()
        };
        assert_eq!(measure_at(&c01), vec![4, 8]);
        assert_eq!(measure_at(&c02), vec![4, 11]);
        let c12 = build_lg_circuit(TimePair::P12, 0.3).unwrap();
        assert_eq!(measure_at(&c12), vec![7, 11]);
        assert!(build_lg_circuit(TimePair { i: 0, j: 3 }, 0.3).is_err());
        assert!(TimePair::new(2, 1).is_err());
    }

    #[test]
    fn no_evolution_means_agreement() {
        let d = exact_probabilities(&build_lg_circuit(TimePair::P12, 0.0).unwrap()).unwrap();
        assert!((d.prob_of("00").unwrap() + d.prob_of("11").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlator_from_counts() {
        let perfect = ShotCounts::from_pairs(2, &[("00", 500), ("11", 500)]).unwrap();
        let c = estimate_correlator(TimePair::P01, &perfect).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(c.std_error, 0.0);
        let flat = ShotCounts::from_pairs(2, &[("00", 250), ("01", 250), ("10", 250), ("11", 250)]).unwrap();
        let c = estimate_correlator(TimePair::P01, &flat).unwrap();
        assert_eq!(c.value, 0.0);
        assert!((c.std_error - (1.0f64 / 1000.0).sqrt()).abs() < 1e-15);
        let empty = ShotCounts::empty(2);
        assert!(matches!(estimate_correlator(TimePair::P01, &empty), Err(Error::EmptyData(_))));
    }

    #[test]
    fn analytic_correlator_values() {
        assert_eq!(analytic_correlator(2.0, 1.0, 1.0), 1.0);
        assert!(analytic_correlator(1.0, FRAC_PI_2, 0.0).abs() < 1e-15);
        assert!((analytic_correlator(1.0, PI, 0.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn k3_landmarks() {
        let k3 = |w| analytic_k_string(KString::K3, w).unwrap();
        assert!((k3(PI / 3.0) - 1.5).abs() < 1e-12);
        assert!((k3(PI) + 3.0).abs() < 1e-12);
        assert!((k3(PI / 2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kn_generalizes_k3() {
        for w in [0.1, 0.9, 2.5] {
            let k3 = analytic_k_string(KString::K3, w).unwrap();
            let kn = analytic_k_string(KString::Kn(3), w).unwrap();
            assert!((k3 - kn).abs() < 1e-15);
        }
        // K4 = 3 cos(ωτ) − cos(3ωτ)
        let w = 0.4;
        let k4 = analytic_k_string(KString::Kn(4), w).unwrap();
        assert!((k4 - (3.0 * w.cos() - (3.0 * w).cos())).abs() < 1e-14);
        assert!(KString::Kn(2).terms().is_err());
    }

    #[test]
    fn missing_correlator_is_config_error() {
        let only = [CorrelatorEstimate {
            pair: TimePair::P01,
            value: 0.5,
            std_error: 0.1,
            shots: 100,
        }];
        assert!(matches!(compute_k_string(&only, KString::K3), Err(Error::Config(_))));
    }

    #[test]
    fn k_errors_add_in_quadrature() {
        let cs: Vec<_> = TimePair::STANDARD
            .iter()
            .zip([0.3, 0.4, 1.2])
            .map(|(&pair, e)| CorrelatorEstimate {
                pair,
                value: 0.1,
                std_error: e,
                shots: 1,
            })
            .collect();
        let k = compute_k_string(&cs, KString::K3).unwrap();
        assert!((k.std_error - 1.3).abs() < 1e-12);
        assert!((k.value - 0.1).abs() < 1e-15);
    }

    #[test]
    fn scan_rejects_bad_settings() {
        let s = ScanSettings {
            shots: 10,
            n_reps: 1,
            n_sigma: 1.0,
            noise: None,
            seed: 0,
        };
        assert!(scan_violation(&[0.5], &s).is_err());
        assert!(scan_violation(&[0.5], &ScanSettings { shots: 0, n_reps: 5, ..s }).is_err());
    }

    #[test]
    fn grid_covers_half_open_interval() {
        let g = uniform_grid(4);
        assert_eq!(g, vec![0.0, FRAC_PI_2, PI, 1.5 * PI]);
    }
}
