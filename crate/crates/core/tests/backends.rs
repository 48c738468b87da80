//! Statevector, density-matrix and sampling backends agree with each other.

use std::f64::consts::{FRAC_PI_2, PI};

use mrviol_core::lg::{build_lg_circuit, TimePair};
use mrviol_core::qndm::{build_qndm_circuit, QndmPart};
use mrviol_core::sim::{exact_probabilities, run_density, run_shots, Circuit, GateOp, NoiseModel};
use proptest::prelude::*;

fn protocol_corpus() -> Vec<Circuit> {
    let mut out = Vec::new();
    for w in [0.0, 0.3, FRAC_PI_2, 1.5, PI, 4.0, 5.9] {
        for p in TimePair::STANDARD {
            out.push(build_lg_circuit(p, w).unwrap());
        }
        for l in [0.0, 0.5, 1.0, 2.0 * PI, 37.3] {
            out.push(build_qndm_circuit(l, w, QndmPart::RealPart));
            out.push(build_qndm_circuit(l, w, QndmPart::ImagPart));
        }
    }
    out
}

#[derive(Clone, Debug)]
enum Step {
    H(usize),
    U1(usize, f64),
    U2(usize, f64, f64),
    Rz(usize, f64),
    Cx(usize, usize),
    Szz(usize, usize, f64),
    Measure(usize),
}

fn step(n: usize) -> impl Strategy<Value = Step> {
    let q = 0..n;
    let a = -7.0..7.0f64;
    let pair = (0..n, 1..n).prop_map(move |(x, d)| (x, (x + d) % n));
    prop_oneof![
        q.clone().prop_map(Step::H),
        (q.clone(), a.clone()).prop_map(|(q, a)| Step::U1(q, a)),
        (q.clone(), a.clone(), a.clone()).prop_map(|(q, a, b)| Step::U2(q, a, b)),
        (q.clone(), a.clone()).prop_map(|(q, a)| Step::Rz(q, a)),
        pair.clone().prop_map(|(x, y)| Step::Cx(x, y)),
        (pair, a).prop_map(|((x, y), a)| Step::Szz(x, y, a)),
        q.prop_map(Step::Measure),
    ]
}

fn random_circuit() -> impl Strategy<Value = Circuit> {
    (2..=3usize)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(step(n), 1..25), 0..n))
        .prop_map(|(n, steps, last)| {
            let mut c = Circuit::new(n);
            for s in steps {
                match s {
                    Step::H(q) => drop(c.push(GateOp::h(q))),
                    Step::U1(q, a) => drop(c.push(GateOp::u1(q, a))),
                    Step::U2(q, a, b) => drop(c.push(GateOp::u2(q, a, b))),
                    Step::Rz(q, a) => drop(c.push(GateOp::rz(q, a))),
                    Step::Cx(x, y) => drop(c.push(GateOp::cx(x, y))),
                    Step::Szz(x, y, a) => drop(c.push(GateOp::szz(x, y, a))),
                    Step::Measure(q) => {
                        if c.record_slots() < 8 {
                            c.measure(q);
                        }
                    }
                }
            }
            c.measure(last);
            c
        })
}

#[test]
fn noiseless_density_matches_branch_sum_on_protocol_circuits() {
    for c in protocol_corpus() {
        let a = run_density(&c, None).unwrap().distribution;
        let b = exact_probabilities(&c).unwrap();
        assert!(a.total_variation(&b) < 1e-10);
        assert!((b.total() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn noiseless_density_matches_branch_sum(c in random_circuit()) {
        let a = run_density(&c, None).unwrap().distribution;
        let b = exact_probabilities(&c).unwrap();
        prop_assert!(a.total_variation(&b) < 1e-10);
    }

    #[test]
    fn noisy_density_stays_physical(c in random_circuit(), scale in 0.0..50.0f64) {
        let noise = NoiseModel::nisq_default().scale_depolarizing(scale);
        let out = run_density(&c, Some(&noise)).unwrap();
        prop_assert!((out.distribution.total() - 1.0).abs() < 1e-10);
        prop_assert!(out.distribution.probs().iter().all(|&p| p > -1e-12));
        prop_assert!(out.state.is_physical());
    }
}

#[test]
fn shot_frequencies_track_exact_probabilities() {
    let circuits = [
        build_lg_circuit(TimePair::P02, 1.1).unwrap(),
        build_qndm_circuit(1.0, 1.5, QndmPart::ImagPart),
        build_lg_circuit(TimePair::P12, 2.4).unwrap(),
    ];
    let shots = 2000u64;
    for c in &circuits {
        let exact = exact_probabilities(c).unwrap();
        let mut within = 0;
        let mut checks = 0;
        for seed in 0..100 {
            let counts = run_shots(c, shots, seed).unwrap();
            for (r, &p) in exact.probs().iter().enumerate() {
                let sigma = (p * (1.0 - p) / shots as f64).sqrt();
                checks += 1;
                if (counts.frequency(r) - p).abs() <= 5.0 * sigma + 1e-12 {
                    within += 1;
                }
            }
        }
        assert!(within as f64 >= 0.99 * checks as f64, "{within}/{checks}");
    }
}

#[test]
fn first_two_measurements_agree_half_the_time_at_quarter_period() {
    let d = exact_probabilities(&build_lg_circuit(TimePair::P01, FRAC_PI_2).unwrap()).unwrap();
    let same = d.prob_of("00").unwrap() + d.prob_of("11").unwrap();
    assert!((same - 0.5).abs() < 1e-12);
}

#[test]
fn purity_never_grows_with_depolarizing_strength() {
    let c = build_qndm_circuit(1.0, 1.5, QndmPart::RealPart);
    let base = NoiseModel::nisq_default();
    let purity = |m: &NoiseModel| run_density(&c, Some(m)).unwrap().state.purity();
    let scales = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 20.0];
    for pair in scales.windows(2) {
        let lo = purity(&base.scale_depolarizing(pair[0]));
        let hi = purity(&base.scale_depolarizing(pair[1]));
        assert!(hi <= lo + 1e-12, "scale {} -> {}: {lo} -> {hi}", pair[0], pair[1]);
    }
    // p1 and p2 separately
    for p in [0.0, 0.01, 0.05, 0.2] {
        let a = purity(&NoiseModel { p1: p, ..base.clone() });
        let b = purity(&NoiseModel { p1: p + 0.05, ..base.clone() });
        assert!(b <= a + 1e-12);
        let a = purity(&NoiseModel { p2: p, ..base.clone() });
        let b = purity(&NoiseModel { p2: p + 0.05, ..base.clone() });
        assert!(b <= a + 1e-12);
    }
}
