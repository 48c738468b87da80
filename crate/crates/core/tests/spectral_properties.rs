use mrviol_core::qndm::{exact_g, exact_sweep, sweep_g, QuasiCharacteristic};
use mrviol_core::spectral::{
    default_delta_grid, detect_negativity, extrema, forward_from_weights, full_period_delta_grid, inverse_qpd,
    noise_floor, window_weights, DEFAULT_DELTA_MAX, DEFAULT_N_SIGMA,
};
use mrviol_core::Complex64;
use proptest::prelude::*;

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

#[test]
fn integral_over_one_alias_period_is_one() {
    for (w, dl) in [(1.5, 0.1), (1.5, 1.0), (0.0, 0.1), (3.0, 0.5)] {
        let gc = exact_sweep(w, 100.0, dl).unwrap();
        let qpd = inverse_qpd(&gc, &full_period_delta_grid(&gc)).unwrap();
        assert!((qpd.integral - 1.0).abs() < 1e-6, "ωτ={w} Δλ={dl}: {}", qpd.integral);
    }
}

#[test]
fn window_weights_round_trip() {
    // leakage out of each ±1/2 window falls like 1/λ_max
    let gc = exact_sweep(1.5, 5000.0, 0.5).unwrap();
    let w = window_weights(&gc, -4..=4).unwrap();
    for k in 0..200 {
        let l = 0.05 + k as f64 * 0.0973;
        let err = (forward_from_weights(&w, l) - exact_g(l, 1.5)).norm();
        assert!(err < 1e-3, "λ={l}: {err}");
    }
}

#[test]
fn weight_stays_on_the_integer_spectrum() {
    for w in [0.0, 0.6, 1.5, 2.8] {
        let gc = exact_sweep(w, 100.0, 0.1).unwrap();
        let weights = window_weights(&gc, -6..=6).unwrap();
        let total: f64 = weights.values().map(|x| x.abs()).sum();
        let outside: f64 = weights.iter().filter(|(n, _)| n.abs() > 3).map(|(_, x)| x.abs()).sum();
        assert!(outside <= 0.01 * total, "ωτ={w}: {outside} of {total}");
    }
}

#[test]
fn negative_peak_sits_at_two() {
    let gc = exact_sweep(1.5, 100.0, 0.1).unwrap();
    let w = window_weights(&gc, -3..=3).unwrap();
    assert!(w[&2] < -0.45, "{w:?}");
    for (n, x) in &w {
        if *n != 2 {
            assert!(*x > 0.0, "Δ={n}: {x}");
        }
    }
}

#[test]
fn peak_locations_survive_coarse_sampling() {
    let window = grid(-DEFAULT_DELTA_MAX, DEFAULT_DELTA_MAX, 0.01);
    let fine = inverse_qpd(&exact_sweep(1.5, 100.0, 0.1).unwrap(), &window).unwrap();
    let coarse = inverse_qpd(&exact_sweep(1.5, 100.0, 1.0).unwrap(), &window).unwrap();
    let (fmin, fmax) = extrema(&fine);
    let (cmin, cmax) = extrema(&coarse);
    assert!((fmin - cmin).abs() <= 0.01 + 1e-9, "{fmin} vs {cmin}");
    assert!((fmax - cmax).abs() <= 0.01 + 1e-9, "{fmax} vs {cmax}");
    assert!((fmin - 2.0).abs() <= 0.05);
}

#[test]
fn sampled_noise_stays_small_in_the_guard_band() {
    let delta = default_delta_grid();
    let mut quiet = 0;
    for seed in 0..100 {
        let gc = sweep_g(1.5, 100.0, 0.1, 1000, seed, None).unwrap();
        let qpd = inverse_qpd(&gc, &delta).unwrap();
        let limit = 5.0 * qpd.noise_floor;
        let ok = qpd
            .delta_grid
            .iter()
            .zip(&qpd.values)
            .filter(|(d, _)| d.abs() > 3.5)
            .all(|(_, v)| v.abs() <= limit);
        if ok {
            quiet += 1;
        }
    }
    assert!(quiet >= 95, "{quiet}/100 trials quiet beyond |Δ| = 3.5");
}

#[test]
fn sampled_sweeps_detect_the_negative_peak() {
    let gc = sweep_g(1.5, 100.0, 0.1, 1000, 9, None).unwrap();
    let qpd = inverse_qpd(&gc, &default_delta_grid()).unwrap();
    assert!(qpd.noise_floor > 0.0);
    assert_eq!(qpd.noise_floor, noise_floor(&gc));
    let v = detect_negativity(&qpd, DEFAULT_N_SIGMA, DEFAULT_DELTA_MAX).unwrap();
    assert!(v.violated && (v.min_location - 2.0).abs() <= 0.05, "{v:?}");
}

fn table(values: Vec<(f64, f64)>) -> QuasiCharacteristic {
    let n = values.len();
    let mut gc = QuasiCharacteristic::tabulate(0.3, n, |_| Complex64::new(0.0, 0.0));
    gc.values = values.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
    gc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_is_linear(
        pairs in prop::collection::vec(((-1.0..1.0f64, -1.0..1.0f64), (-1.0..1.0f64, -1.0..1.0f64)), 2..60),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let (g1, g2): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let mixed: Vec<_> = g1.iter().zip(&g2).map(|(x, y)| (a * x.0 + b * y.0, a * x.1 + b * y.1)).collect();
        let delta = default_delta_grid();
        let p1 = inverse_qpd(&table(g1), &delta).unwrap();
        let p2 = inverse_qpd(&table(g2), &delta).unwrap();
        let pm = inverse_qpd(&table(mixed), &delta).unwrap();
        for j in 0..delta.len() {
            prop_assert!((pm.values[j] - (a * p1.values[j] + b * p2.values[j])).abs() < 1e-12);
        }
    }
}
