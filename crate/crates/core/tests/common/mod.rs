//! Shared fixtures and random generators for integration tests.

#![allow(dead_code)]

use adiashort::{
    make_ising_spectrum, CosineMode, IsingChainParams, Protocol, RelaxationSpectrum, SingularTerm,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reference Ising chain: J = 1, Γ₀ = 0.95, N = 10, ħ = 1.
pub fn fig1_spectrum() -> RelaxationSpectrum {
    make_ising_spectrum(&IsingChainParams::new(1.0, 0.95, 10, 1.0)).unwrap()
}

pub fn cosine_spectrum(modes: &[(f64, f64)]) -> RelaxationSpectrum {
    let modes = modes
        .iter()
        .map(|&(c, w)| CosineMode::new(c, w).unwrap())
        .collect();
    RelaxationSpectrum::new(modes, Vec::new()).unwrap()
}

/// Pure cosine spectrum with `1..=max_modes` modes whose frequencies are
/// separated by at least 10% so the comb system stays well conditioned.
pub fn random_cosine_spectrum(rng: &mut ChaCha8Rng, max_modes: usize, omega_max: f64) -> RelaxationSpectrum {
    let k = rng.gen_range(1..=max_modes);
    loop {
        let mut omegas: Vec<f64> = (0..k).map(|_| rng.gen_range(0.3..omega_max)).collect();
        omegas.sort_by(f64::total_cmp);
        if omegas.windows(2).all(|w| w[1] > 1.1 * w[0]) {
            let modes: Vec<(f64, f64)> = omegas
                .into_iter()
                .map(|w| (rng.gen_range(0.05..1.0), w))
                .collect();
            return cosine_spectrum(&modes);
        }
    }
}

/// Piecewise-linear protocol with random interior breakpoints and values plus
/// up to `max_terms` singular terms of order at most `max_order`, with
/// independent start and end weights.
pub fn random_protocol(rng: &mut ChaCha8Rng, tau: f64, max_terms: usize, max_order: u32) -> Protocol {
    let interior = rng.gen_range(0..4);
    let mut times: Vec<f64> = (0..interior).map(|_| rng.gen_range(0.05..0.95) * tau).collect();
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * tau);
    let mut breakpoints = vec![(0.0, rng.gen_range(-0.5..0.5))];
    breakpoints.extend(times.into_iter().map(|t| (t, rng.gen_range(-0.5..1.5))));
    breakpoints.push((tau, rng.gen_range(0.5..1.5)));

    let mut orders: Vec<u32> = (0..=max_order).collect();
    let terms = rng.gen_range(0..=max_terms.min(orders.len()));
    let mut singular = Vec::with_capacity(terms);
    for _ in 0..terms {
        let n = orders.swap_remove(rng.gen_range(0..orders.len()));
        let scale = tau.powi(n as i32 + 1);
        singular.push(SingularTerm {
            derivative_order: n,
            weight_at_start: rng.gen_range(-0.2..0.2) * scale,
            weight_at_end: rng.gen_range(-0.2..0.2) * scale,
        });
    }
    Protocol::new(tau, breakpoints, singular).unwrap()
}

/// Admissible protocol symmetric under `g(τ−t) = 1 − g(t)`: symmetric
/// breakpoints and an antisymmetric comb of even orders.
pub fn random_symmetric_protocol(rng: &mut ChaCha8Rng, tau: f64) -> Protocol {
    let half = rng.gen_range(0..3);
    let mut left: Vec<f64> = (0..half).map(|_| rng.gen_range(0.05..0.45) * tau).collect();
    left.sort_by(f64::total_cmp);
    left.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * tau);
    let left: Vec<(f64, f64)> = std::iter::once((0.0, rng.gen_range(-0.3..0.6)))
        .chain(left.into_iter().map(|t| (t, rng.gen_range(-0.5..1.0))))
        .collect();
    let mut breakpoints = left.clone();
    breakpoints.push((0.5 * tau, 0.5));
    breakpoints.extend(left.iter().rev().map(|&(t, g)| (tau - t, 1.0 - g)));

    let mut singular = Vec::new();
    for n in [0u32, 2, 4] {
        if rng.gen_bool(0.5) {
            let weight = rng.gen_range(-0.3..0.3) * tau.powi(n as i32 + 1);
            singular.push(SingularTerm::antisymmetric(n, weight));
        }
    }
    Protocol::new(tau, breakpoints, singular).unwrap()
}

pub fn log_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    let (a, b) = (min.ln(), max.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
