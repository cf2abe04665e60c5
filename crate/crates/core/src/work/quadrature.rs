//! Time-domain excess work with mollified distributions.
//!
//! Every piece of the distributional derivative `dg` is convolved with a
//! unit-mass Gaussian `φ_σ`: a jump `Δ` at `t₀` becomes `Δ φ_σ(t−t₀)`, a slope
//! segment becomes a difference of error functions, and a comb term
//! `w δ⁽ⁿ⁾(t)` in `g` becomes `w φ_σ^{(n+1)}(t)` in `ġ`. The ordered double
//! integral
//!
//! ```text
//! W_ex = δλ² ∫∫_{t' < t} Ψ(t−t') ġ(t') ġ(t) dt' dt
//! ```
//!
//! is then evaluated by the trapezoid rule on a uniform grid covering
//! `[−12σ, τ+12σ]`, so comb terms keep their full mass. The kernel is separable
//! per mode, so each width costs O(grid · modes).
//! Results at widths `σ, σ/2, σ/4` are combined by two levels of Richardson
//! extrapolation in `σ²`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::{DriveParams, Method, ModeLabel, ModeWork, WorkError, WorkResult};
use crate::protocol::Protocol;
use crate::relaxation::RelaxationSpectrum;

/// Gaussian tails beyond this many widths are dropped; e^{−72} keeps
/// high-order Hermite lobes negligible.
const SUPPORT_WIDTHS: f64 = 12.0;
/// Grid points per narrowest width.
const POINTS_PER_WIDTH: f64 = 8.0;
/// Grid spacing bound relative to the fastest period.
const SPACING_PER_FREQUENCY: f64 = 0.05;

fn domain(p: &Protocol, width: f64) -> (f64, f64) {
    let pad = SUPPORT_WIDTHS * width;
    (-pad, p.tau() + pad)
}

fn spacing_limits(spec: &RelaxationSpectrum, width: f64) -> (f64, f64) {
    let freq = spec
        .max_frequency()
        .map_or(f64::INFINITY, |w| SPACING_PER_FREQUENCY / w);
    (freq, width / 4.0 / POINTS_PER_WIDTH)
}

/// Smallest grid that satisfies the resolution requirements of
/// [`excess_work_quadrature`] for this width.
pub fn suggested_grid_points(spec: &RelaxationSpectrum, p: &Protocol, width: f64) -> usize {
    let (lo, hi) = domain(p, width);
    let (freq, comb) = spacing_limits(spec, width);
    let h = freq.min(comb);
    let mut intervals = ((hi - lo) / h).ceil() as usize;
    // the division can round down across an integer; recheck in the same arithmetic
    while (hi - lo) / intervals as f64 > h {
        intervals += 1;
    }
    intervals + 1
}

/// Mollified excess work, extrapolated over widths `{w, w/2, w/4}`.
///
/// `grid_points` counts nodes on `[−12w, τ+12w]`; the spacing must be at most
/// `0.05/ω_max` and `(w/4)/8`.
pub fn excess_work_quadrature(
    spec: &RelaxationSpectrum,
    p: &Protocol,
    drive: &DriveParams,
    mollifier_width: f64,
    grid_points: usize,
) -> Result<WorkResult, WorkError> {
    if !(mollifier_width.is_finite() && mollifier_width > 0.0) {
        return Err(WorkError::InvalidWidth(mollifier_width));
    }
    let (lo, hi) = domain(p, mollifier_width);
    let h = (hi - lo) / (grid_points.max(2) - 1) as f64;
    let (freq_limit, comb_limit) = spacing_limits(spec, mollifier_width);
    if grid_points < 3 || h > freq_limit {
        return Err(WorkError::GridTooCoarse {
            spacing: h,
            limit: freq_limit,
        });
    }
    if h > comb_limit {
        return Err(WorkError::UnresolvedComb {
            spacing: h,
            limit: comb_limit,
        });
    }

    let times: Vec<f64> = (0..grid_points).map(|i| lo + h * i as f64).collect();
    let widths = [mollifier_width, mollifier_width / 2.0, mollifier_width / 4.0];
    let per_width: Vec<Vec<f64>> = widths
        .iter()
        .map(|&w| {
            let gdot: Vec<f64> = times.iter().map(|&t| mollified_gdot(p, w, t)).collect();
            ordered_double_integrals(spec, &times, &gdot, h)
        })
        .collect();

    let scale = drive.delta_lambda * drive.delta_lambda;
    let labels = spec
        .cosine_modes()
        .iter()
        .map(|m| {
            (
                ModeLabel::Cosine {
                    omega: m.angular_frequency,
                },
                m.amplitude,
            )
        })
        .chain(spec.exponential_modes().iter().map(|m| {
            (
                ModeLabel::Exponential {
                    tau_r: m.decay_time,
                },
                m.amplitude,
            )
        }));
    let per_mode: Vec<ModeWork> = labels
        .enumerate()
        .map(|(k, (mode, amplitude))| ModeWork {
            mode,
            contribution: scale
                * amplitude
                * richardson(per_width[0][k], per_width[1][k], per_width[2][k]),
        })
        .collect();
    Ok(WorkResult {
        excess_work: per_mode.iter().map(|m| m.contribution).sum(),
        per_mode,
        method: Method::Quadrature,
    })
}

/// Mollified work at a single width without extrapolation, per unit δλ².
pub fn mollified_work_at(spec: &RelaxationSpectrum, p: &Protocol, width: f64, grid_points: usize) -> f64 {
    let (lo, hi) = domain(p, width);
    let h = (hi - lo) / (grid_points - 1) as f64;
    let times: Vec<f64> = (0..grid_points).map(|i| lo + h * i as f64).collect();
    let gdot: Vec<f64> = times.iter().map(|&t| mollified_gdot(p, width, t)).collect();
    let amplitudes = spec
        .cosine_modes()
        .iter()
        .map(|m| m.amplitude)
        .chain(spec.exponential_modes().iter().map(|m| m.amplitude));
    ordered_double_integrals(spec, &times, &gdot, h)
        .iter()
        .zip(amplitudes)
        .map(|(s, a)| a * s)
        .sum()
}

/// Two-level Richardson in σ² over the sequence σ, σ/2, σ/4.
fn richardson(w1: f64, w2: f64, w4: f64) -> f64 {
    let r1 = (4.0 * w2 - w1) / 3.0;
    let r2 = (4.0 * w4 - w2) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// `∫∫_{t'<t} K(t−t') f(t') f(t)` per unit-amplitude mode, trapezoid rule.
///
/// With half weight on the diagonal the ordered sum is exactly half the full
/// symmetric trapezoid sum. For cosine kernels that half sum factorizes as
/// `½ |Σ_j e^{iωt_j} f_j h|²`, which is how it is accumulated: the running
/// ordered form squares the cancellation between the large mollified comb
/// lobes. Exponential kernels use a running prefix with a geometric update.
fn ordered_double_integrals(spec: &RelaxationSpectrum, times: &[f64], f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.mode_count());
    for m in spec.cosine_modes() {
        let w = m.angular_frequency;
        let transform: Complex64 = times
            .iter()
            .zip(f)
            .map(|(&t, &fi)| Complex64::cis(w * t) * fi)
            .sum();
        out.push(0.5 * (transform * h).norm_sqr());
    }
    for m in spec.exponential_modes() {
        let decay = (-h / m.decay_time).exp();
        let mut prefix = 0.0;
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &fi in f {
            prefix = decay * (prefix + prev);
            acc += fi * (prefix + 0.5 * fi);
            prev = fi;
        }
        out.push(acc * h * h);
    }
    out
}

/// `ġ` convolved with a Gaussian of standard deviation `width`, at `t`.
fn mollified_gdot(p: &Protocol, width: f64, t: f64) -> f64 {
    let tau = p.tau();
    let mut value = p.start_jump() * gaussian_derivative(t, width, 0)
        + p.end_jump() * gaussian_derivative(t - tau, width, 0);
    for (t1, t2, _, slope) in p.segments() {
        // Φ((t−t₁)/σ) − Φ((t−t₂)/σ) written with erfc for accuracy in the tails
        let z1 = (t1 - t) / width * FRAC_1_SQRT_2;
        let z2 = (t2 - t) / width * FRAC_1_SQRT_2;
        value += slope * 0.5 * (libm::erfc(z1) - libm::erfc(z2));
    }
    for s in p.singular_terms() {
        let n = s.derivative_order;
        // δ⁽ⁿ⁾(τ−t) = (−1)ⁿ δ⁽ⁿ⁾(t−τ)
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        value += s.weight_at_start * gaussian_derivative(t, width, n + 1)
            + s.weight_at_end * parity * gaussian_derivative(t - tau, width, n + 1);
    }
    value
}

/// `d^k/dx^k` of the unit-mass Gaussian with standard deviation `sigma`:
/// `(−1)^k He_k(x/σ) φ_σ(x) / σ^k` with probabilists' Hermite polynomials.
fn gaussian_derivative(x: f64, sigma: f64, k: u32) -> f64 {
    let y = x / sigma;
    if y.abs() > SUPPORT_WIDTHS + 4.0 {
        return 0.0;
    }
    let density = (-0.5 * y * y).exp() / (sigma * (2.0 * PI).sqrt());
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..k {
        let next = y * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * cur * density / sigma.powi(k as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::work::excess_work_spectral;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_derivatives_match_finite_differences() {
        let sigma = 0.3;
        let h = 1e-5;
        for k in 0..6 {
            for x in [-0.7, -0.1, 0.0, 0.25, 0.9] {
                let fd = (gaussian_derivative(x + h, sigma, k) - gaussian_derivative(x - h, sigma, k)) / (2.0 * h);
                let exact = gaussian_derivative(x, sigma, k + 1);
                assert_relative_eq!(exact, fd, max_relative = 1e-5, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn gaussian_has_unit_mass() {
        let sigma = 0.2;
        let h = sigma / 20.0;
        let mass: f64 = (-400..=400).map(|i| gaussian_derivative(i as f64 * h, sigma, 0)).sum::<f64>() * h;
        assert_relative_eq!(mass, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn fixed_width_matches_damped_spectrum() {
        // Convolving dg with φ_σ multiplies Ĝ by e^{−ω²σ²/2}, so the work at a
        // fixed width is Σ c |Ĝ|² e^{−ω²σ²} / 2.
        let spec = RelaxationSpectrum::new(
            vec![
                crate::relaxation::CosineMode::new(0.6, 1.1).unwrap(),
                crate::relaxation::CosineMode::new(0.4, 3.2).unwrap(),
            ],
            vec![],
        )
        .unwrap();
        let p = Protocol::new(
            2.0,
            vec![(0.0, 0.1), (0.8, 0.6), (2.0, 0.9)],
            vec![crate::protocol::SingularTerm::antisymmetric(0, 0.2),
                 crate::protocol::SingularTerm { derivative_order: 3, weight_at_start: 0.01, weight_at_end: 0.02 }],
        )
        .unwrap();
        let sigma = 0.1;
        let n = suggested_grid_points(&spec, &p, sigma);
        let got = mollified_work_at(&spec, &p, sigma, n);
        let expected: f64 = spec
            .cosine_modes()
            .iter()
            .map(|m| {
                let w = m.angular_frequency;
                0.5 * m.amplitude * p.fourier_of_gdot(w).norm_sqr() * (-(w * sigma).powi(2)).exp()
            })
            .sum();
        assert_relative_eq!(got, expected, max_relative = 1e-11);
    }

    #[test]
    fn zero_protocol_has_zero_work() {
        let spec = RelaxationSpectrum::cosine(1.0, 2.0).unwrap();
        let p = Protocol::with_endpoints(3.0, vec![(0.0, 0.0), (3.0, 0.0)], vec![], 0.0, 0.0).unwrap();
        let d = DriveParams::new(1.0, 10.0);
        let n = suggested_grid_points(&spec, &p, 0.05);
        let w = excess_work_quadrature(&spec, &p, &d, 0.05, n).unwrap();
        assert_eq!(w.excess_work, 0.0);
    }

    #[test]
    fn ramp_matches_spectral() {
        let spec = RelaxationSpectrum::cosine(1.0, 2.0).unwrap();
        let d = DriveParams::new(0.5, 10.0);
        for tau in [0.7, 2.0, 4.5] {
            let p = Protocol::ramp(tau).unwrap();
            let width = (tau / 50.0).min(0.3 / 2.0);
            let n = suggested_grid_points(&spec, &p, width);
            let q = excess_work_quadrature(&spec, &p, &d, width, n).unwrap();
            let s = excess_work_spectral(&spec, &p, &d).unwrap();
            assert_relative_eq!(q.excess_work, s.excess_work, max_relative = 1e-6);
            assert_eq!(q.method, Method::Quadrature);
        }
    }

    #[test]
    fn shortcut_work_vanishes_at_every_width() {
        let omega = 1.5;
        let spec = RelaxationSpectrum::cosine(1.0, omega).unwrap();
        let tau = 2.0;
        let p = Protocol::universal(0.0, &[(0, 1.0 / (omega * omega))], tau).unwrap();
        let ramp = Protocol::ramp(tau).unwrap();
        let ramp_work = excess_work_spectral(&spec, &ramp, &DriveParams::new(1.0, 10.0)).unwrap().excess_work;
        for width in [tau / 50.0, tau / 100.0, tau / 200.0] {
            let n = suggested_grid_points(&spec, &p, width);
            let w = mollified_work_at(&spec, &p, width, n);
            assert!(w.abs() < 1e-10 * ramp_work, "width {width}: {w}");
        }
    }

    #[test]
    fn width_sequence_converges() {
        let spec = RelaxationSpectrum::cosine(1.0, 3.0).unwrap();
        let tau = 1.3;
        let p = Protocol::new(tau, vec![(0.0, 0.0), (tau, 1.0)], vec![crate::protocol::SingularTerm::antisymmetric(2, 0.05)]).unwrap();
        let exact = excess_work_spectral(&spec, &p, &DriveParams::new(1.0, 10.0)).unwrap().excess_work;
        let errs: Vec<f64> = [tau / 50.0, tau / 100.0, tau / 200.0]
            .iter()
            .map(|&w| {
                let n = suggested_grid_points(&spec, &p, w);
                (mollified_work_at(&spec, &p, w, n) - exact).abs()
            })
            .collect();
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!(order1 >= 1.0 && order2 >= 1.0, "{errs:?}");
    }

    #[test]
    fn exponential_kernel_ramp() {
        // ramp against e^{−|t|/τ_R}: (δλ²/τ²) ∫₀^τ∫₀^t e^{−(t−t')/τ_R} dt' dt
        //   = (δλ²/τ²) τ_R (τ − τ_R(1 − e^{−τ/τ_R}))
        let (tr, tau) = (0.8, 2.5);
        let spec = RelaxationSpectrum::exponential(1.0, tr).unwrap();
        let p = Protocol::ramp(tau).unwrap();
        let d = DriveParams::new(1.0, 10.0);
        let width = 0.02;
        let n = 4 * suggested_grid_points(&spec, &p, width);
        let w = excess_work_quadrature(&spec, &p, &d, width, n).unwrap();
        let expected = tr * (tau - tr * (1.0 - (-tau / tr).exp())) / (tau * tau);
        assert_relative_eq!(w.excess_work, expected, max_relative = 1e-4);
    }

    #[test]
    fn grid_checks() {
        let spec = RelaxationSpectrum::cosine(1.0, 50.0).unwrap();
        let p = Protocol::ramp(1.0).unwrap();
        let d = DriveParams::new(1.0, 10.0);
        assert!(matches!(
            excess_work_quadrature(&spec, &p, &d, 0.1, 200),
            Err(WorkError::GridTooCoarse { .. })
        ));
        let spec = RelaxationSpectrum::cosine(1.0, 1.0).unwrap();
        assert!(matches!(
            excess_work_quadrature(&spec, &p, &d, 0.01, 200),
            Err(WorkError::UnresolvedComb { .. })
        ));
        assert_eq!(
            excess_work_quadrature(&spec, &p, &d, 0.0, 200),
            Err(WorkError::InvalidWidth(0.0))
        );
    }

    #[test]
    fn suggested_grid_is_always_accepted() {
        let spec = RelaxationSpectrum::cosine(1.0, 3.3).unwrap();
        let d = DriveParams::new(1.0, 10.0);
        for i in 1..200 {
            let tau = 0.5 + 0.0237 * i as f64;
            let p = Protocol::ramp(tau).unwrap();
            let width = (tau / 50.0).min(0.3 / 3.3);
            let n = suggested_grid_points(&spec, &p, width);
            assert!(excess_work_quadrature(&spec, &p, &d, width, n).is_ok(), "tau = {tau}");
        }
    }
}
