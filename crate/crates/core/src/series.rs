//! Laurent expansion of `1/(s·L{Ψ̈}(s))` around `s = 0` and the waiting time.
//!
//! With Ψ normalized to Ψ(0) = 1 and `L{Ψ̈}(s) = s²L{Ψ}(s) − s`, the expression
//! becomes `−1/(s² D(s))` where `D(s) = 1 − s·L{Ψ}(s)`. For the mode families
//! supported here `D` has exactly known Taylor coefficients:
//!
//! * cosine `ĉ cos(ωt)`: `ĉ ω²/(s²+ω²) = ĉ Σ_m (−1)^m (s/ω)^{2m}`
//! * exponential `Â e^{−t/τ}`: `Â/(1+sτ) = Â Σ_m (−sτ)^m`
//!
//! so the series is obtained by power-series long division of `1/D` followed by
//! a shift of two orders and a sign flip. `a₋₂ = −1` always, and
//! `a₋₁ = −L{Ψ/Ψ(0)}(0) = −τ_w`.

use serde::Serialize;
use thiserror::Error;

use crate::relaxation::RelaxationSpectrum;

/// Largest truncation order accepted by [`laurent_coefficients`].
pub const DEFAULT_MAX_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("requested truncation order {requested} exceeds maximum {max}")]
    TruncationOverflow { requested: usize, max: usize },
    #[error("spectrum mixes cosine and exponential modes; series expansion is restricted to pure spectra")]
    NotExpandable,
    #[error("coefficient a_{index} is not finite (extreme frequency or decay-time range)")]
    NonFinite { index: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesCoefficients {
    pub a_minus2: f64,
    pub a_minus1: f64,
    /// `a_0 ..= a_M`.
    pub a_regular: Vec<f64>,
    pub normalized: bool,
}

impl SeriesCoefficients {
    pub fn truncation_order(&self) -> usize {
        self.a_regular.len() - 1
    }

    /// Coefficient `a_n` for `n >= -2`; `None` beyond the truncation order.
    pub fn get(&self, n: i64) -> Option<f64> {
        match n {
            -2 => Some(self.a_minus2),
            -1 => Some(self.a_minus1),
            n if n >= 0 => self.a_regular.get(n as usize).copied(),
            _ => None,
        }
    }

    /// Comb weights `(n, −a_n)` in the sign convention of
    /// [`crate::protocol::Protocol::universal`].
    ///
    /// The expansion of `1/(s·L{Ψ̈})` gives `a_0 = −1/ω²` for a single cosine
    /// mode, while zero excess work needs the comb weight `+1/(τω²)` on
    /// `δ(t) − δ(τ−t)`; the flip happens here and nowhere else. Vanishing
    /// coefficients are dropped.
    pub fn comb_weights(&self) -> Vec<(u32, f64)> {
        self.a_regular
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(n, a)| (n as u32, -a))
            .collect()
    }

    /// Waiting time recovered from the series, `−a₋₁`.
    pub fn waiting_time(&self) -> f64 {
        // adding +0.0 turns the −0.0 of cosine spectra into 0.0
        -self.a_minus1 + 0.0
    }
}

/// Default truncation order `2K − 2` for `K` modes (never below 0).
pub fn default_order(spec: &RelaxationSpectrum) -> usize {
    (2 * spec.mode_count()).saturating_sub(2)
}

/// Laurent coefficients `a_{−2} ..= a_order` of `1/(s·L{Ψ̈/Ψ(0)}(s))`.
pub fn laurent_coefficients(
    spec: &RelaxationSpectrum,
    order: usize,
) -> Result<SeriesCoefficients, SeriesError> {
    laurent_coefficients_with_limit(spec, order, DEFAULT_MAX_ORDER)
}

pub fn laurent_coefficients_with_limit(
    spec: &RelaxationSpectrum,
    order: usize,
    max_order: usize,
) -> Result<SeriesCoefficients, SeriesError> {
    if order > max_order {
        return Err(SeriesError::TruncationOverflow {
            requested: order,
            max: max_order,
        });
    }
    if !(spec.is_pure_cosine() || spec.is_pure_exponential()) {
        return Err(SeriesError::NotExpandable);
    }

    // 1/D is needed through s^{order+2}
    let len = order + 3;
    let denominator = taylor_of_d(spec, len);
    let inverse = invert_series(&denominator);

    let a: Vec<f64> = inverse.iter().map(|b| -b).collect();
    if let Some(i) = a.iter().position(|x| !x.is_finite()) {
        return Err(SeriesError::NonFinite { index: i as i64 - 2 });
    }
    Ok(SeriesCoefficients {
        a_minus2: a[0],
        a_minus1: a[1],
        a_regular: a[2..].to_vec(),
        normalized: true,
    })
}

/// Taylor coefficients of `D(s) = 1 − s·L{Ψ/Ψ(0)}(s)` through `s^{len−1}`.
fn taylor_of_d(spec: &RelaxationSpectrum, len: usize) -> Vec<f64> {
    let psi0 = spec.psi0();
    let mut d = vec![0.0; len];
    for mode in spec.cosine_modes() {
        let weight = mode.amplitude / psi0;
        let inv_w2 = 1.0 / (mode.angular_frequency * mode.angular_frequency);
        let mut term = weight;
        for coeff in d.iter_mut().step_by(2) {
            *coeff += term;
            term *= -inv_w2;
        }
    }
    for mode in spec.exponential_modes() {
        let weight = mode.amplitude / psi0;
        let mut term = weight;
        for coeff in d.iter_mut() {
            *coeff += term;
            term *= -mode.decay_time;
        }
    }
    d
}

/// Reciprocal of a power series with nonzero constant term, by long division.
fn invert_series(d: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0; d.len()];
    b[0] = 1.0 / d[0];
    for m in 1..d.len() {
        let acc: f64 = (1..=m).map(|j| d[j] * b[m - j]).sum();
        b[m] = -acc / d[0];
    }
    b
}

/// Waiting time `τ_w = L{Ψ/Ψ(0)}(0)`: zero for cosine modes, `Σ (A_j/Ψ(0)) τ_j`
/// otherwise.
pub fn waiting_time(spec: &RelaxationSpectrum) -> f64 {
    let psi0 = spec.psi0();
    spec.exponential_modes()
        .iter()
        .map(|m| m.amplitude / psi0 * m.decay_time)
        .sum()
}

/// A system admits a shortcut to adiabaticity when `a₋₁` vanishes.
pub fn is_shortcut_candidate(coeffs: &SeriesCoefficients, tol: f64) -> bool {
    coeffs.a_minus1.abs() <= tol
}
