//! Drive protocols `g(t)` on `[0, τ]`.
//!
//! A protocol is a continuous piecewise-linear part plus a comb of Dirac-delta
//! derivatives anchored at the endpoints:
//!
//! ```text
//! g(t) = g_C(t) + Σ_n [ w_start,n δ⁽ⁿ⁾(t) + w_end,n δ⁽ⁿ⁾(τ − t) ]
//! ```
//!
//! Outside the interval the drive sits at `g_initial` (before 0) and
//! `g_final` (after τ), normally 0 and 1. A mismatch between those and the
//! first/last breakpoint is a finite jump. Comb terms sit infinitesimally
//! inside `[0, τ]`: their full mass counts in every integral while their
//! pointwise value at the endpoints is zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("switching time must be finite and positive, got {0}")]
    NonpositiveTau(f64),
    #[error("a protocol needs at least two breakpoints")]
    TooFewBreakpoints,
    #[error("breakpoints must start at t = 0 and end at t = tau")]
    BreakpointSpan,
    #[error("breakpoint times must be strictly increasing")]
    NonIncreasingBreakpoints,
    #[error("singular derivative order {0} appears more than once")]
    DuplicateOrder(u32),
    #[error("non-finite value in protocol")]
    NonFinite,
    #[error("waiting time must be finite and nonnegative, got {0}")]
    NegativeWaitingTime(f64),
}

/// `weight_at_start · δ⁽ⁿ⁾(t) + weight_at_end · δ⁽ⁿ⁾(τ − t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularTerm {
    #[serde(rename = "order")]
    pub derivative_order: u32,
    #[serde(rename = "w_start")]
    pub weight_at_start: f64,
    #[serde(rename = "w_end")]
    pub weight_at_end: f64,
}

impl SingularTerm {
    /// Time-reversal antisymmetric pair `w (δ⁽ⁿ⁾(t) − δ⁽ⁿ⁾(τ−t))`.
    pub fn antisymmetric(order: u32, weight: f64) -> Self {
        Self {
            derivative_order: order,
            weight_at_start: weight,
            weight_at_end: -weight,
        }
    }
}

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Serialize, Deserialize)]
struct ProtocolRepr {
    tau: f64,
    breakpoints: Vec<(f64, f64)>,
    #[serde(default)]
    singular: Vec<SingularTerm>,
    #[serde(default = "zero", skip_serializing_if = "is_zero")]
    g_initial: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    g_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProtocolRepr", into = "ProtocolRepr")]
pub struct Protocol {
    tau: f64,
    breakpoints: Vec<(f64, f64)>,
    singular: Vec<SingularTerm>,
    g_initial: f64,
    g_final: f64,
}

impl TryFrom<ProtocolRepr> for Protocol {
    type Error = ProtocolError;

    fn try_from(r: ProtocolRepr) -> Result<Self, Self::Error> {
        Protocol::with_endpoints(r.tau, r.breakpoints, r.singular, r.g_initial, r.g_final)
    }
}

impl From<Protocol> for ProtocolRepr {
    fn from(p: Protocol) -> Self {
        ProtocolRepr {
            tau: p.tau,
            breakpoints: p.breakpoints,
            singular: p.singular,
            g_initial: p.g_initial,
            g_final: p.g_final,
        }
    }
}

fn check_tau(tau: f64) -> Result<(), ProtocolError> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(ProtocolError::NonpositiveTau(tau))
    }
}

impl Protocol {
    /// Protocol with the standard endpoint values `g(0⁻) = 0`, `g(τ⁺) = 1`.
    pub fn new(
        tau: f64,
        breakpoints: Vec<(f64, f64)>,
        singular: Vec<SingularTerm>,
    ) -> Result<Self, ProtocolError> {
        Self::with_endpoints(tau, breakpoints, singular, 0.0, 1.0)
    }

    /// Protocol with explicit outer values. Only integrand tests and
    /// comparison drives need anything other than 0 and 1.
    pub fn with_endpoints(
        tau: f64,
        mut breakpoints: Vec<(f64, f64)>,
        singular: Vec<SingularTerm>,
        g_initial: f64,
        g_final: f64,
    ) -> Result<Self, ProtocolError> {
        check_tau(tau)?;
        if breakpoints.len() < 2 {
            return Err(ProtocolError::TooFewBreakpoints);
        }
        let finite = breakpoints.iter().all(|(t, g)| t.is_finite() && g.is_finite())
            && singular
                .iter()
                .all(|s| s.weight_at_start.is_finite() && s.weight_at_end.is_finite())
            && g_initial.is_finite()
            && g_final.is_finite();
        if !finite {
            return Err(ProtocolError::NonFinite);
        }
        let span_tol = 1e-12 * tau;
        let last = breakpoints.len() - 1;
        if breakpoints[0].0.abs() > span_tol || (breakpoints[last].0 - tau).abs() > span_tol {
            return Err(ProtocolError::BreakpointSpan);
        }
        breakpoints[0].0 = 0.0;
        breakpoints[last].0 = tau;
        if breakpoints.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(ProtocolError::NonIncreasingBreakpoints);
        }
        let mut singular = singular;
        singular.sort_by_key(|s| s.derivative_order);
        if let Some(w) = singular
            .windows(2)
            .find(|w| w[0].derivative_order == w[1].derivative_order)
        {
            return Err(ProtocolError::DuplicateOrder(w[0].derivative_order));
        }
        Ok(Self {
            tau,
            breakpoints,
            singular,
            g_initial,
            g_final,
        })
    }

    /// Linear ramp `t/τ`.
    pub fn ramp(tau: f64) -> Result<Self, ProtocolError> {
        check_tau(tau)?;
        Self::new(tau, vec![(0.0, 0.0), (tau, 1.0)], Vec::new())
    }

    /// Sudden quench: jump to 1 at `t = 0`.
    pub fn quench(tau: f64) -> Result<Self, ProtocolError> {
        check_tau(tau)?;
        Self::new(tau, vec![(0.0, 1.0), (tau, 1.0)], Vec::new())
    }

    /// Universal optimal protocol
    ///
    /// ```text
    /// g*(t) = (t + τ_w)/(τ + 2τ_w) + Σ_n a_n (δ⁽ⁿ⁾(t) − δ⁽ⁿ⁾(τ−t))/(τ + 2τ_w)
    /// ```
    ///
    /// `comb_weights` are `(n, a_n)` pairs in the sign convention for which a
    /// single cosine mode needs `a_0 = +1/ω²` (see
    /// [`crate::series::SeriesCoefficients::comb_weights`]).
    pub fn universal(
        waiting_time: f64,
        comb_weights: &[(u32, f64)],
        tau: f64,
    ) -> Result<Self, ProtocolError> {
        check_tau(tau)?;
        if !(waiting_time.is_finite() && waiting_time >= 0.0) {
            return Err(ProtocolError::NegativeWaitingTime(waiting_time));
        }
        let denom = tau + 2.0 * waiting_time;
        let breakpoints = vec![
            (0.0, waiting_time / denom),
            (tau, (tau + waiting_time) / denom),
        ];
        let singular = comb_weights
            .iter()
            .map(|&(n, a)| SingularTerm::antisymmetric(n, a / denom))
            .collect();
        Self::new(tau, breakpoints, singular)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn singular_terms(&self) -> &[SingularTerm] {
        &self.singular
    }

    pub fn g_initial(&self) -> f64 {
        self.g_initial
    }

    pub fn g_final(&self) -> f64 {
        self.g_final
    }

    /// Jump at `t = 0`, `g(0⁺) − g(0⁻)`.
    pub fn start_jump(&self) -> f64 {
        self.breakpoints[0].1 - self.g_initial
    }

    /// Jump at `t = τ`, `g(τ⁺) − g(τ⁻)`.
    pub fn end_jump(&self) -> f64 {
        self.g_final - self.breakpoints[self.breakpoints.len() - 1].1
    }

    /// Linear segments `(t₁, t₂, g₁, slope)`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.breakpoints.windows(2).map(|w| {
            let (t1, g1) = w[0];
            let (t2, g2) = w[1];
            (t1, t2, g1, (g2 - g1) / (t2 - t1))
        })
    }

    /// Continuous part at `t ∈ [0, τ]` (clamped outside).
    pub fn continuous_value(&self, t: f64) -> f64 {
        let bp = &self.breakpoints;
        if t <= 0.0 {
            return bp[0].1;
        }
        if t >= self.tau {
            return bp[bp.len() - 1].1;
        }
        let i = bp.partition_point(|(tb, _)| *tb <= t);
        let (t1, g1) = bp[i - 1];
        let (t2, g2) = bp[i];
        g1 + (g2 - g1) * (t - t1) / (t2 - t1)
    }

    /// Same protocol with every comb weight multiplied by `factor`.
    pub fn scale_comb(&self, factor: f64) -> Self {
        let mut p = self.clone();
        for s in &mut p.singular {
            s.weight_at_start *= factor;
            s.weight_at_end *= factor;
        }
        p
    }

    /// Time-stretched copy `g_new(t) = g(t·τ/τ_new)`.
    ///
    /// `δ⁽ⁿ⁾(a t) = a^{−(n+1)} δ⁽ⁿ⁾(t)` for `a > 0`, so comb weights pick up
    /// `(τ_new/τ)^{n+1}`.
    pub fn rescaled(&self, new_tau: f64) -> Result<Self, ProtocolError> {
        check_tau(new_tau)?;
        let stretch = new_tau / self.tau;
        let mut bp: Vec<(f64, f64)> = self
            .breakpoints
            .iter()
            .map(|&(t, g)| (t * stretch, g))
            .collect();
        let last = bp.len() - 1;
        bp[last].0 = new_tau;
        let singular = self
            .singular
            .iter()
            .map(|s| {
                let f = stretch.powi(s.derivative_order as i32 + 1);
                SingularTerm {
                    derivative_order: s.derivative_order,
                    weight_at_start: s.weight_at_start * f,
                    weight_at_end: s.weight_at_end * f,
                }
            })
            .collect();
        Self::with_endpoints(new_tau, bp, singular, self.g_initial, self.g_final)
    }

    /// Time-reversal symmetry `g(t) = 1 − g(τ − t)` on the continuous part
    /// (checked at every breakpoint and reflected breakpoint), on the outer
    /// values, and antisymmetric comb weights.
    pub fn is_time_reversal_symmetric(&self, tol: f64) -> bool {
        let continuous_ok = self.breakpoints.iter().all(|&(t, _)| {
            let lhs = self.continuous_value(t) + self.continuous_value(self.tau - t);
            (lhs - 1.0).abs() <= tol
        });
        let outer_ok = (self.g_initial + self.g_final - 1.0).abs() <= tol;
        let comb_ok = self
            .singular
            .iter()
            .all(|s| (s.weight_at_end + s.weight_at_start).abs() <= tol);
        continuous_ok && outer_ok && comb_ok
    }

    /// `Ĝ(ω) = ∫ e^{iωt} dg(t)` over the distributional derivative of `g`.
    ///
    /// * slope `β` on `[t₁, t₂]`: `β (e^{iωt₂} − e^{iωt₁})/(iω)`
    /// * jump `Δ` at `t₀`: `Δ e^{iωt₀}`
    /// * `w δ⁽ⁿ⁾(t)`: its derivative pairs as
    ///   `∫ e^{iωt} δ⁽ⁿ⁺¹⁾(t) dt = (−1)^{n+1} (iω)^{n+1} = (−iω)^{n+1}`
    /// * `w δ⁽ⁿ⁾(τ−t) = w (−1)ⁿ δ⁽ⁿ⁾(t−τ)`: gives `−w (iω)^{n+1} e^{iωτ}`
    pub fn fourier_of_gdot(&self, omega: f64) -> Complex64 {
        let i = Complex64::i();
        let mut total = Complex64::new(self.start_jump(), 0.0)
            + self.end_jump() * Complex64::cis(omega * self.tau);
        for (t1, t2, _, slope) in self.segments() {
            // (e^{iωt₂} − e^{iωt₁})/(iω) = e^{iω(t₁+t₂)/2} · 2 sin(ω(t₂−t₁)/2)/ω
            let half = 0.5 * (t2 - t1);
            let sinc_factor = if omega * half == 0.0 {
                2.0 * half
            } else {
                2.0 * (omega * half).sin() / omega
            };
            total += slope * sinc_factor * Complex64::cis(omega * (t1 + half));
        }
        let end_phase = Complex64::cis(omega * self.tau);
        for s in &self.singular {
            let k = s.derivative_order as i32 + 1;
            let iw = (i * omega).powi(k);
            let minus_iw = (-i * omega).powi(k);
            total += s.weight_at_start * minus_iw - s.weight_at_end * iw * end_phase;
        }
        total
    }
}
