//! Gate-level constructions of the protocol unitaries.

use std::f64::consts::FRAC_PI_2;

use super::gate::GateOp;

/// `U1(φ + π/2) · H · U1(θ) · H`: takes `|0>` to `cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`
/// up to a global phase. Gates are returned in application order.
pub fn initial_state(qubit: usize, theta: f64, phi: f64) -> Vec<GateOp> {
    vec![
        GateOp::h(qubit),
        GateOp::u1(qubit, theta),
        GateOp::h(qubit),
        GateOp::u1(qubit, phi + FRAC_PI_2),
    ]
}

/// `exp(-i α σx) = H · Rz(2α) · H`.
///
/// For a time step `τ` under `H = ω σx / 2` pass `α = ωτ / 2`.
pub fn evolution(qubit: usize, alpha: f64) -> Vec<GateOp> {
    vec![GateOp::h(qubit), GateOp::rz(qubit, 2.0 * alpha), GateOp::h(qubit)]
}

/// `exp(i (λ/2) σz ⊗ σz)` up to a global phase, as `CX · [1 ⊗ U1(-λ)] · CX`.
pub fn interaction(system: usize, detector: usize, lambda: f64) -> Vec<GateOp> {
    vec![
        GateOp::cx(system, detector),
        GateOp::u1(detector, -lambda),
        GateOp::cx(system, detector),
    ]
}
