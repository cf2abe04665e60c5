mod common;

use adiashort::{CosineMode, ExponentialMode, RelaxationSpectrum};
use common::{fig1_spectrum, rng};
use rand::Rng;

fn mixed() -> RelaxationSpectrum {
    RelaxationSpectrum::new(
        vec![CosineMode::new(0.6, 1.3).unwrap(), CosineMode::new(0.3, 2.7).unwrap()],
        vec![ExponentialMode::new(0.4, 1.8).unwrap()],
    )
    .unwrap()
}

/// Composite Simpson on [0, T]; the neglected tail is below Ψ(0) e^{−sT}/s.
fn laplace_by_quadrature(spec: &RelaxationSpectrum, s: f64, t_max: f64, intervals: usize) -> f64 {
    let h = t_max / intervals as f64;
    let f = |t: f64| (-s * t).exp() * spec.eval(t);
    let mut acc = f(0.0) + f(t_max);
    for i in 1..intervals {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * f(i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn laplace_matches_direct_integration() {
    let spec = mixed();
    let s: f64 = 0.7;
    let t_max: f64 = 60.0;
    let tail = spec.psi0() * (-s * t_max).exp() / s;
    assert!(tail < 1e-15);
    let numeric = laplace_by_quadrature(&spec, s, t_max, 40_000);
    assert!((numeric - spec.laplace(s)).abs() <= 1e-8, "{numeric} vs {}", spec.laplace(s));
}

#[test]
fn laplace_matches_direct_integration_for_ising() {
    let spec = fig1_spectrum();
    for s in [0.5, 1.0, 3.0] {
        let numeric = laplace_by_quadrature(&spec, s, 80.0, 200_000);
        assert!((numeric - spec.laplace(s)).abs() <= 1e-8);
    }
}

#[test]
fn relaxation_function_is_even() {
    let mut rng = rng(7);
    for spec in [mixed(), fig1_spectrum()] {
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(-50.0..50.0);
            assert!((spec.eval(t) - spec.eval(-t)).abs() <= 1e-15 * spec.psi0());
        }
    }
}

#[test]
fn cosine_derivatives_have_parity_of_their_order() {
    let spec = fig1_spectrum();
    let mut rng = rng(8);
    for _ in 0..200 {
        let t: f64 = rng.gen_range(0.01..20.0);
        for order in 0..8u32 {
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            let plus = spec.eval_derivative(t, order).unwrap();
            let minus = spec.eval_derivative(-t, order).unwrap();
            let scale = spec.max_frequency().unwrap().powi(order as i32) * spec.psi0();
            assert!((plus - sign * minus).abs() <= 1e-13 * scale);
        }
    }
}

#[test]
fn spectrum_json_round_trip() {
    let spec = mixed();
    let text = serde_json::to_string(&spec).unwrap();
    let back: RelaxationSpectrum = serde_json::from_str(&text).unwrap();
    assert_eq!(spec, back);
}
