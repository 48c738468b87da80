//! Circuit-evaluation counts for the two protocols.

use serde::Serialize;

use crate::config::ExperimentConfig;

/// Distinct circuits per Leggett-Garg estimate: C01, C12, C02.
pub const N_MEAS_LG: u64 = 3;
/// Distinct circuits per λ point: real and imaginary quadrature.
pub const N_MEAS_QNDM: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub n_meas_lg: u64,
    pub n_meas_qndm: u64,
    pub n_steps_lambda: Option<u64>,
    pub n_lg: Option<u64>,
    pub n_qndm: Option<u64>,
}

pub fn lg_evaluations(shots: u64) -> u64 {
    N_MEAS_LG * shots
}

/// `λ_max / Δλ` rounded to the nearest integer.
pub fn n_steps_lambda(lambda_max: f64, delta_lambda: f64) -> u64 {
    (lambda_max / delta_lambda).round() as u64
}

pub fn qndm_evaluations(n_steps: u64, shots: u64) -> u64 {
    N_MEAS_QNDM * n_steps * shots
}

pub fn resource_report(config: &ExperimentConfig) -> ResourceReport {
    let steps = config
        .mode
        .runs_qndm()
        .then(|| n_steps_lambda(config.lambda_max, config.delta_lambda));
    ResourceReport {
        n_meas_lg: N_MEAS_LG,
        n_meas_qndm: N_MEAS_QNDM,
        n_steps_lambda: steps,
        n_lg: config.mode.runs_lg().then(|| lg_evaluations(config.shots)),
        n_qndm: steps.map(|s| qndm_evaluations(s, config.shots)),
    }
}
