//! Excess work of a protocol against a relaxation spectrum.
//!
//! For a cosine spectrum `Ψ(t) = Σ c_k cos(ω_k t)` the symmetric double
//! integral factorizes per mode:
//!
//! ```text
//! W_ex = (δλ²/2) ∫∫ Ψ(t−t') ġ(t') ġ(t) dt' dt = (δλ²/2) Σ_k c_k |Ĝ(ω_k)|²
//! ```
//!
//! with `Ĝ` from [`Protocol::fourier_of_gdot`]. That is exact for
//! distributional protocols. [`excess_work_quadrature`] is the independent
//! time-domain check.

mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::Protocol;
use crate::relaxation::RelaxationSpectrum;

pub use quadrature::{excess_work_quadrature, mollified_work_at, suggested_grid_points};

/// `|δλ/λ₀|` above which the weak-drive diagnostic fires.
pub const WEAK_DRIVE_THRESHOLD: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkError {
    #[error("spectral evaluation requires a pure cosine spectrum")]
    UnsupportedSpectrum,
    #[error("grid spacing {spacing:e} exceeds {limit:e} required to resolve the fastest mode")]
    GridTooCoarse { spacing: f64, limit: f64 },
    #[error("grid spacing {spacing:e} does not resolve the narrowest mollifier (needs <= {limit:e})")]
    UnresolvedComb { spacing: f64, limit: f64 },
    #[error("mollifier width must be finite and positive, got {0}")]
    InvalidWidth(f64),
    #[error("sample time {0} lies outside (0, tau)")]
    SampleOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub delta_lambda: f64,
    pub lambda0: f64,
}

impl DriveParams {
    pub fn new(delta_lambda: f64, lambda0: f64) -> Self {
        Self {
            delta_lambda,
            lambda0,
        }
    }

    /// True when `|δλ/λ₀|` exceeds [`WEAK_DRIVE_THRESHOLD`], i.e. the linear
    /// response treatment is questionable.
    pub fn weak_drive_warning(&self) -> bool {
        !((self.delta_lambda / self.lambda0).abs() <= WEAK_DRIVE_THRESHOLD)
    }

    /// `δλ² Ψ(0) / 2`, the single-mode quench value used to normalize work.
    pub fn work_scale(&self, spec: &RelaxationSpectrum) -> f64 {
        0.5 * self.delta_lambda * self.delta_lambda * spec.psi0()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Quadrature,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeLabel {
    Cosine { omega: f64 },
    Exponential { tau_r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeWork {
    pub mode: ModeLabel,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkResult {
    pub excess_work: f64,
    pub per_mode: Vec<ModeWork>,
    pub method: Method,
}

impl WorkResult {
    /// Excess work in units of `δλ² Ψ(0) / 2`.
    pub fn normalized(&self, spec: &RelaxationSpectrum, drive: &DriveParams) -> f64 {
        self.excess_work / drive.work_scale(spec)
    }
}

fn require_cosine(spec: &RelaxationSpectrum) -> Result<(), WorkError> {
    if spec.is_pure_cosine() {
        Ok(())
    } else {
        Err(WorkError::UnsupportedSpectrum)
    }
}

pub fn excess_work_spectral(
    spec: &RelaxationSpectrum,
    p: &Protocol,
    drive: &DriveParams,
) -> Result<WorkResult, WorkError> {
    require_cosine(spec)?;
    let prefactor = 0.5 * drive.delta_lambda * drive.delta_lambda;
    let per_mode: Vec<ModeWork> = spec
        .cosine_modes()
        .iter()
        .map(|m| ModeWork {
            mode: ModeLabel::Cosine {
                omega: m.angular_frequency,
            },
            contribution: prefactor * m.amplitude * p.fourier_of_gdot(m.angular_frequency).norm_sqr(),
        })
        .collect();
    Ok(WorkResult {
        excess_work: per_mode.iter().map(|m| m.contribution).sum(),
        per_mode,
        method: Method::Spectral,
    })
}

/// Antiderivative of `e^{−iωt'} (α + βt')` in `t'`.
fn linear_times_phase(omega: f64, alpha: f64, beta: f64, t: f64) -> Complex64 {
    Complex64::cis(-omega * t)
        * Complex64::new(beta / (omega * omega), (alpha + beta * t) / omega)
}

/// `∫₀^τ e^{−iωt'} g_C(t') dt'` over the continuous part.
fn continuous_pairing(p: &Protocol, omega: f64) -> Complex64 {
    p.segments()
        .map(|(t1, t2, g1, slope)| {
            let alpha = g1 - slope * t1;
            linear_times_phase(omega, alpha, slope, t2) - linear_times_phase(omega, alpha, slope, t1)
        })
        .sum()
}

/// Residual `∫₀^τ Ψ̈(t−t') g(t') dt' − Ψ̇(τ−t)` of the Euler-Lagrange
/// equation at each sample time.
///
/// Comb terms pair as `⟨δ⁽ⁿ⁾(·−t₀), f⟩ = (−1)ⁿ f⁽ⁿ⁾(t₀)`, which gives
/// `Ψ^{(n+2)}(t)` for a start delta and `(−1)ⁿ Ψ^{(n+2)}(t−τ)` for an end
/// delta `δ⁽ⁿ⁾(τ−t')`.
pub fn euler_lagrange_residual(
    spec: &RelaxationSpectrum,
    p: &Protocol,
    t_samples: &[f64],
) -> Result<Vec<f64>, WorkError> {
    require_cosine(spec)?;
    let tau = p.tau();
    let pairings: Vec<Complex64> = spec
        .cosine_modes()
        .iter()
        .map(|m| continuous_pairing(p, m.angular_frequency))
        .collect();

    t_samples
        .iter()
        .map(|&t| {
            if !(t > 0.0 && t < tau) {
                return Err(WorkError::SampleOutOfRange(t));
            }
            // Ψ̈(u) = −c ω² cos(ωu) = −c ω² Re(e^{iωt} e^{−iωt'})
            let continuous: f64 = spec
                .cosine_modes()
                .iter()
                .zip(&pairings)
                .map(|(m, pair)| {
                    let w = m.angular_frequency;
                    -m.amplitude * w * w * (Complex64::cis(w * t) * pair).re
                })
                .sum();
            let mut comb = 0.0;
            for s in p.singular_terms() {
                let k = s.derivative_order + 2;
                let parity = if s.derivative_order % 2 == 0 { 1.0 } else { -1.0 };
                comb += s.weight_at_start * derivative(spec, t, k)
                    + s.weight_at_end * parity * derivative(spec, t - tau, k);
            }
            Ok(continuous + comb - derivative(spec, tau - t, 1))
        })
        .collect()
}

/// Optimal-work formula `W* = (δλ²/2) Ψ(0) + (δλ²/2) ∫₀^τ Ψ̇(τ−t) g(t) dt`.
///
/// Valid only for protocols solving the Euler-Lagrange equation; on other
/// inputs it differs from [`excess_work_spectral`].
pub fn optimal_excess_work(
    spec: &RelaxationSpectrum,
    p: &Protocol,
    drive: &DriveParams,
) -> Result<f64, WorkError> {
    require_cosine(spec)?;
    let tau = p.tau();
    // Ψ̇(τ−t') = −c ω sin(ω(τ−t')) = −c ω Im(e^{iωτ} e^{−iωt'})
    let continuous: f64 = spec
        .cosine_modes()
        .iter()
        .map(|m| {
            let w = m.angular_frequency;
            -m.amplitude * w * (Complex64::cis(w * tau) * continuous_pairing(p, w)).im
        })
        .sum();
    let mut comb = 0.0;
    for s in p.singular_terms() {
        let k = s.derivative_order + 1;
        let parity = if s.derivative_order % 2 == 0 { 1.0 } else { -1.0 };
        comb += s.weight_at_start * derivative(spec, tau, k)
            + s.weight_at_end * parity * derivative(spec, 0.0, k);
    }
    let prefactor = 0.5 * drive.delta_lambda * drive.delta_lambda;
    Ok(prefactor * (spec.psi0() + continuous + comb))
}

fn derivative(spec: &RelaxationSpectrum, t: f64, order: u32) -> f64 {
    spec.eval_derivative(t, order)
        .expect("cosine spectra have derivatives everywhere")
}
