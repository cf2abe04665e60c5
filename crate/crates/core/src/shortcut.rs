//! Exact finite comb for zero excess work.
//!
//! For the ansatz `g(t) = t/τ + Σ_{m<K} w_m (δ^{(2m)}(t) − δ^{(2m)}(τ−t))`
//! the transform is
//!
//! ```text
//! Ĝ(ω) = i (e^{iωτ} − 1) [ −1/(ωτ) + Σ_m (−1)^m w_m ω^{2m+1} ]
//! ```
//!
//! so `Ĝ(ω_k) = 0` for every mode is the real linear system
//! `Σ_m u_m x_k^{m+1} = 1` in `x_k = ω_k²`, with `u_m = (−1)^m τ w_m`. The
//! τ-dependence factors out: the system is solved once for `u` and weights
//! are `(−1)^m u_m / τ`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::protocol::{Protocol, ProtocolError};
use crate::relaxation::RelaxationSpectrum;
use crate::work::{excess_work_spectral, DriveParams, WorkError};

/// Condition number above which the comb system is refused.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShortcutError {
    #[error("comb solver requires a nonempty pure cosine spectrum")]
    UnsupportedSpectrum,
    #[error("comb system is singular (repeated frequencies)")]
    SingularSystem,
    #[error("comb system condition number {0:e} exceeds limit {MAX_CONDITION:e}")]
    IllConditioned(f64),
    #[error("switching time grid must be nonempty, positive and increasing")]
    InvalidGrid,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Work(#[from] WorkError),
}

/// Solved comb for a concrete switching time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombSolution {
    pub tau: f64,
    /// Derivative orders `0, 2, …, 2(K−1)`.
    pub orders: Vec<u32>,
    /// Weight of `δ⁽ⁿ⁾(t) − δ⁽ⁿ⁾(τ−t)`, 1/τ included.
    pub weights: Vec<f64>,
    /// `Ω_n` with `weights[n−1] = 1/(τ Ω_n^{2n})`; `None` where the weight is
    /// not positive.
    pub omega_n: Vec<Option<f64>>,
    /// 2-norm condition number of the column-equilibrated system.
    pub condition_number: f64,
}

impl CombSolution {
    /// Comb weights at τ = 1, in the form taken by [`Protocol::universal`].
    pub fn unit_weights(&self) -> Vec<(u32, f64)> {
        self.orders
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| (n, w * self.tau))
            .collect()
    }

    /// Same comb at another switching time.
    pub fn rescaled(&self, tau: f64) -> Self {
        let factor = self.tau / tau;
        Self {
            tau,
            weights: self.weights.iter().map(|w| w * factor).collect(),
            ..self.clone()
        }
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.weights.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    /// Positions of weights whose `Ω_n` is undefined.
    pub fn nonpositive_terms(&self) -> Vec<usize> {
        self.omega_n
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.is_none().then_some(i))
            .collect()
    }
}

fn check_spectrum(spec: &RelaxationSpectrum) -> Result<(), ShortcutError> {
    if spec.is_pure_cosine() && !spec.cosine_modes().is_empty() {
        Ok(())
    } else {
        Err(ShortcutError::UnsupportedSpectrum)
    }
}

/// Solves the comb system for `spec` and returns weights at switching time `tau`.
pub fn solve_comb(spec: &RelaxationSpectrum, tau: f64) -> Result<CombSolution, ShortcutError> {
    check_spectrum(spec)?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(ProtocolError::NonpositiveTau(tau).into());
    }
    let x: Vec<f64> = spec
        .cosine_modes()
        .iter()
        .map(|m| m.angular_frequency * m.angular_frequency)
        .collect();
    let k = x.len();
    if x.windows(2).any(|w| w[0] == w[1]) {
        return Err(ShortcutError::SingularSystem);
    }

    // Column m is scaled by x_ref^{m+1} so entries lie in (0, 1].
    let x_ref = x.iter().cloned().fold(0.0, f64::max);
    let matrix = DMatrix::from_fn(k, k, |row, col| (x[row] / x_ref).powi(col as i32 + 1));
    let singular_values = matrix.clone().singular_values();
    let smax = singular_values.max();
    let smin = singular_values.min();
    if smin == 0.0 {
        return Err(ShortcutError::SingularSystem);
    }
    let condition_number = smax / smin;
    if !(condition_number <= MAX_CONDITION) {
        return Err(ShortcutError::IllConditioned(condition_number));
    }

    let rhs = DVector::from_element(k, 1.0);
    let scaled = matrix
        .lu()
        .solve(&rhs)
        .ok_or(ShortcutError::SingularSystem)?;

    let mut orders = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    let mut omega_n = Vec::with_capacity(k);
    for m in 0..k {
        let u = scaled[m] / x_ref.powi(m as i32 + 1);
        let unit = if m % 2 == 0 { u } else { -u };
        orders.push(2 * m as u32);
        weights.push(unit / tau);
        // unit = 1/Ω^{2n} with n = m + 1
        omega_n.push((unit > 0.0).then(|| unit.powf(-1.0 / (2.0 * (m + 1) as f64))));
    }
    Ok(CombSolution {
        tau,
        orders,
        weights,
        omega_n,
        condition_number,
    })
}

/// Ramp plus solved comb, assembled with zero waiting time.
pub fn build_shortcut(spec: &RelaxationSpectrum, tau: f64) -> Result<Protocol, ShortcutError> {
    let comb = solve_comb(spec, 1.0)?;
    Ok(Protocol::universal(0.0, &comb.unit_weights(), tau)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortcutCheck {
    pub tau: f64,
    pub excess_work: f64,
    pub pass: bool,
}

/// Builds the shortcut at each τ and checks `|W_ex| ≤ tol · δλ² Ψ(0)`.
///
/// Grid points are evaluated in parallel; output order follows `tau_grid`.
pub fn verify_shortcut(
    spec: &RelaxationSpectrum,
    tau_grid: &[f64],
    drive: &DriveParams,
    tol: f64,
) -> Result<Vec<ShortcutCheck>, ShortcutError> {
    if tau_grid.is_empty() || tau_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(ShortcutError::InvalidGrid);
    }
    let comb = solve_comb(spec, 1.0)?;
    let unit = comb.unit_weights();
    let bound = tol * drive.delta_lambda * drive.delta_lambda * spec.psi0();
    tau_grid
        .par_iter()
        .map(|&tau| {
            let p = Protocol::universal(0.0, &unit, tau)?;
            let w = excess_work_spectral(spec, &p, drive)?.excess_work;
            Ok(ShortcutCheck {
                tau,
                excess_work: w,
                pass: w.abs() <= bound,
            })
        })
        .collect()
}

/// Largest comb weight magnitude at each τ of an increasing sequence.
pub fn asymptotic_decay_check(
    spec: &RelaxationSpectrum,
    tau_sequence: &[f64],
) -> Result<Vec<(f64, f64)>, ShortcutError> {
    let increasing = tau_sequence.windows(2).all(|w| w[1] > w[0]);
    if tau_sequence.is_empty() || !increasing || !(tau_sequence[0] > 0.0) {
        return Err(ShortcutError::InvalidGrid);
    }
    let comb = solve_comb(spec, 1.0)?;
    Ok(tau_sequence
        .iter()
        .map(|&tau| (tau, comb.rescaled(tau).max_abs_weight()))
        .collect())
}
