//! Gate constructions against closed forms obtained by matrix exponentiation.

use std::f64::consts::{FRAC_PI_2, PI};

use mrviol_core::sim::decompose::{evolution, initial_state, interaction};
use mrviol_core::sim::{fragment_unitary, phase_distance, GateOp, Operator, PureState};
use mrviol_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_x() -> Operator {
    Operator::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

fn zz() -> Operator {
    Operator::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]))
}

/// `exp(i · scale · generator)`
fn exp_i(generator: &Operator, scale: f64) -> Operator {
    (generator * c(0.0, scale)).exp()
}

fn state_after(fragment: &[GateOp], n: usize) -> PureState {
    let mut s = PureState::zero(n).unwrap();
    for g in fragment {
        s.apply(g).unwrap();
    }
    s
}

fn angle() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

proptest! {
    #[test]
    fn initial_state_matches_bloch_form(theta in angle(), phi in angle()) {
        let s = state_after(&initial_state(0, theta, phi), 1);
        let target = PureState::from_amplitudes(vec![
            c((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ]).unwrap();
        prop_assert!((s.fidelity(&target) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_is_x_rotation(alpha in angle()) {
        let u = fragment_unitary(&evolution(0, alpha), 1);
        prop_assert!(phase_distance(&u, &exp_i(&pauli_x(), -alpha)) < 1e-10);
    }

    #[test]
    fn interaction_is_zz_coupling(lambda in angle()) {
        let u = fragment_unitary(&interaction(0, 1, lambda), 2);
        prop_assert!(phase_distance(&u, &exp_i(&zz(), lambda / 2.0)) < 1e-10);
        let native = fragment_unitary(&[GateOp::szz(0, 1, lambda)], 2);
        prop_assert!(phase_distance(&u, &native) < 1e-10);
    }

    #[test]
    fn every_gate_is_unitary(a in angle(), b in angle()) {
        let gates = [
            (GateOp::h(0), 1),
            (GateOp::u1(0, a), 1),
            (GateOp::u2(0, a, b), 1),
            (GateOp::rz(0, a), 1),
            (GateOp::cx(0, 1), 2),
            (GateOp::szz(0, 1, a), 2),
        ];
        for (g, n) in gates {
            let m = g.matrix();
            let dim = 1 << n;
            let err = (m.adjoint() * &m - Operator::identity(dim, dim)).norm();
            prop_assert!(err < 1e-12, "{:?}: {}", g, err);
        }
    }
}

#[test]
fn default_initial_state_is_plus_i() {
    let s = state_after(&initial_state(0, FRAC_PI_2, FRAC_PI_2), 1);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let target = PureState::from_amplitudes(vec![c(r, 0.0), c(0.0, r)]).unwrap();
    assert!((s.fidelity(&target) - 1.0).abs() < 1e-12);
}

#[test]
fn initial_state_limits() {
    let zero = PureState::zero(1).unwrap();
    let one = PureState::from_amplitudes(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!((state_after(&initial_state(0, 0.0, 1.234), 1).fidelity(&zero) - 1.0).abs() < 1e-12);
    assert!((state_after(&initial_state(0, PI, 0.0), 1).fidelity(&one) - 1.0).abs() < 1e-12);
}

#[test]
fn evolution_landmarks() {
    assert!(phase_distance(&fragment_unitary(&evolution(0, 0.0), 1), &Operator::identity(2, 2)) < 1e-12);
    let s = state_after(&evolution(0, FRAC_PI_2), 1);
    assert!((s.probability_one(0) - 1.0).abs() < 1e-12);
    let s = state_after(&evolution(0, PI / 4.0), 1);
    assert!((s.probability_one(0) - 0.5).abs() < 1e-12);
}

#[test]
fn full_turn_coupling_is_a_global_phase() {
    let u = fragment_unitary(&interaction(0, 1, 2.0 * PI), 2);
    assert!(phase_distance(&u, &Operator::identity(4, 4)) < 1e-10);
    let oracle = exp_i(&zz(), PI);
    assert!((oracle + Operator::identity(4, 4)).norm() < 1e-12);

    // detector coherence survives
    let mut prep = vec![GateOp::h(1), GateOp::h(0)];
    let before = state_after(&prep, 2);
    prep.extend(interaction(0, 1, 2.0 * PI));
    let after = state_after(&prep, 2);
    assert!((after.fidelity(&before) - 1.0).abs() < 1e-12);
}

#[test]
fn half_turn_coupling_phases() {
    let u = fragment_unitary(&interaction(0, 1, PI), 2);
    // relative phase between |00> and |01> is e^{iπ/2} / e^{-iπ/2}
    let ratio = u[(0, 0)] / u[(1, 1)];
    assert!((ratio - c(-1.0, 0.0)).norm() < 1e-12);
    let oracle = exp_i(&zz(), PI / 2.0);
    assert!((oracle[(0, 0)] - c(0.0, 1.0)).norm() < 1e-12);
    assert!((oracle[(1, 1)] - c(0.0, -1.0)).norm() < 1e-12);
}

#[test]
fn system_is_the_most_significant_qubit() {
    // X on qubit 0 of |00> lands on basis index 2 = |1S 0D>
    let mut s = PureState::zero(2).unwrap();
    for g in evolution(0, FRAC_PI_2) {
        s.apply(&g).unwrap();
    }
    assert!((s.amplitudes()[2].norm() - 1.0).abs() < 1e-12);
}
