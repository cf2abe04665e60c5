//! Relaxation functions as spectral objects.
//!
//! A relaxation function is stored as a finite sum of cosine modes
//! `c_k cos(ω_k t)` plus optional even-extended exponential modes
//! `A_j exp(-|t|/τ_j)`. Pure-cosine spectra describe thermally isolated
//! systems; exponential modes only enter through the waiting time.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance under which two frequencies (or decay times) are merged.
pub const MERGE_RTOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelaxationError {
    #[error("spectrum has no modes")]
    Empty,
    #[error("mode amplitude must be finite and nonnegative, got {0}")]
    NegativeAmplitude(f64),
    #[error("cosine angular frequency must be finite and positive, got {0}")]
    InvalidFrequency(f64),
    #[error("exponential decay time must be finite and positive, got {0}")]
    InvalidDecayTime(f64),
    #[error("relaxation function must satisfy Psi(0) > 0, got {0}")]
    NonpositiveInitialValue(f64),
    #[error("invalid Ising chain parameters: {0}")]
    InvalidIsingParams(String),
    #[error("degenerate Ising spectrum: epsilon({n}) = {epsilon:e} vanishes")]
    DegenerateSpectrum { n: usize, epsilon: f64 },
    #[error("derivative of an exponential mode is undefined at t = 0")]
    KinkAtZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineMode {
    pub amplitude: f64,
    #[serde(rename = "omega")]
    pub angular_frequency: f64,
}

impl CosineMode {
    pub fn new(amplitude: f64, angular_frequency: f64) -> Result<Self, RelaxationError> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(RelaxationError::NegativeAmplitude(amplitude));
        }
        if !(angular_frequency.is_finite() && angular_frequency > 0.0) {
            return Err(RelaxationError::InvalidFrequency(angular_frequency));
        }
        Ok(Self {
            amplitude,
            angular_frequency,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialMode {
    pub amplitude: f64,
    #[serde(rename = "tau_r")]
    pub decay_time: f64,
}

impl ExponentialMode {
    pub fn new(amplitude: f64, decay_time: f64) -> Result<Self, RelaxationError> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(RelaxationError::NegativeAmplitude(amplitude));
        }
        if !(decay_time.is_finite() && decay_time > 0.0) {
            return Err(RelaxationError::InvalidDecayTime(decay_time));
        }
        Ok(Self {
            amplitude,
            decay_time,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    #[serde(default)]
    cosine: Vec<CosineMode>,
    #[serde(default)]
    exponential: Vec<ExponentialMode>,
}

/// A relaxation function Ψ(t) in canonical form.
///
/// Construction sorts modes by ascending frequency (decay time for
/// exponential modes) and merges coincident ones by adding amplitudes, so
/// cosine frequencies are pairwise distinct afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct RelaxationSpectrum {
    cosine: Vec<CosineMode>,
    exponential: Vec<ExponentialMode>,
}

impl TryFrom<SpectrumRepr> for RelaxationSpectrum {
    type Error = RelaxationError;

    fn try_from(repr: SpectrumRepr) -> Result<Self, Self::Error> {
        Self::new(repr.cosine, repr.exponential)
    }
}

impl From<RelaxationSpectrum> for SpectrumRepr {
    fn from(spec: RelaxationSpectrum) -> Self {
        SpectrumRepr {
            cosine: spec.cosine,
            exponential: spec.exponential,
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_RTOL * a.abs().max(b.abs())
}

impl RelaxationSpectrum {
    pub fn new(
        cosine: Vec<CosineMode>,
        exponential: Vec<ExponentialMode>,
    ) -> Result<Self, RelaxationError> {
        // re-validate: serde bypasses the mode constructors
        for m in &cosine {
            CosineMode::new(m.amplitude, m.angular_frequency)?;
        }
        for m in &exponential {
            ExponentialMode::new(m.amplitude, m.decay_time)?;
        }
        if cosine.is_empty() && exponential.is_empty() {
            return Err(RelaxationError::Empty);
        }

        let mut cosine = cosine;
        cosine.sort_by(|a, b| a.angular_frequency.total_cmp(&b.angular_frequency));
        let mut merged_cos: Vec<CosineMode> = Vec::with_capacity(cosine.len());
        for m in cosine {
            match merged_cos.last_mut() {
                Some(last) if close(last.angular_frequency, m.angular_frequency) => {
                    last.amplitude += m.amplitude;
                }
                _ => merged_cos.push(m),
            }
        }

        let mut exponential = exponential;
        exponential.sort_by(|a, b| a.decay_time.total_cmp(&b.decay_time));
        let mut merged_exp: Vec<ExponentialMode> = Vec::with_capacity(exponential.len());
        for m in exponential {
            match merged_exp.last_mut() {
                Some(last) if close(last.decay_time, m.decay_time) => {
                    last.amplitude += m.amplitude;
                }
                _ => merged_exp.push(m),
            }
        }

        let spec = Self {
            cosine: merged_cos,
            exponential: merged_exp,
        };
        let psi0 = spec.psi0();
        if !(psi0 > 0.0) {
            return Err(RelaxationError::NonpositiveInitialValue(psi0));
        }
        Ok(spec)
    }

    /// Single mode `amplitude * cos(omega t)`.
    pub fn cosine(amplitude: f64, omega: f64) -> Result<Self, RelaxationError> {
        Self::new(vec![CosineMode::new(amplitude, omega)?], Vec::new())
    }

    /// Single mode `amplitude * exp(-|t|/tau_r)`.
    pub fn exponential(amplitude: f64, tau_r: f64) -> Result<Self, RelaxationError> {
        Self::new(Vec::new(), vec![ExponentialMode::new(amplitude, tau_r)?])
    }

    pub fn cosine_modes(&self) -> &[CosineMode] {
        &self.cosine
    }

    pub fn exponential_modes(&self) -> &[ExponentialMode] {
        &self.exponential
    }

    pub fn is_pure_cosine(&self) -> bool {
        self.exponential.is_empty()
    }

    pub fn is_pure_exponential(&self) -> bool {
        self.cosine.is_empty()
    }

    pub fn mode_count(&self) -> usize {
        self.cosine.len() + self.exponential.len()
    }

    /// Ψ(0), the sum of all amplitudes.
    pub fn psi0(&self) -> f64 {
        self.cosine.iter().map(|m| m.amplitude).sum::<f64>()
            + self.exponential.iter().map(|m| m.amplitude).sum::<f64>()
    }

    pub fn max_frequency(&self) -> Option<f64> {
        self.cosine.last().map(|m| m.angular_frequency)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let c: f64 = self
            .cosine
            .iter()
            .map(|m| m.amplitude * (m.angular_frequency * t).cos())
            .sum();
        let e: f64 = self
            .exponential
            .iter()
            .map(|m| m.amplitude * (-t.abs() / m.decay_time).exp())
            .sum();
        c + e
    }

    /// Exact `order`-th derivative of Ψ at `t`. Order 0 is Ψ itself.
    pub fn eval_derivative(&self, t: f64, order: u32) -> Result<f64, RelaxationError> {
        if order == 0 {
            return Ok(self.eval(t));
        }
        if !self.exponential.is_empty() && t == 0.0 {
            return Err(RelaxationError::KinkAtZero);
        }
        // d^k/dt^k cos(ωt) = ω^k cos(ωt + kπ/2), quadrant picked exactly
        let c: f64 = self
            .cosine
            .iter()
            .map(|m| {
                let w = m.angular_frequency;
                let phase = w * t;
                let trig = match order % 4 {
                    0 => phase.cos(),
                    1 => -phase.sin(),
                    2 => -phase.cos(),
                    _ => phase.sin(),
                };
                m.amplitude * w.powi(order as i32) * trig
            })
            .sum();
        // exp(-|t|/τ): each derivative brings -sign(t)/τ
        let sign = if t > 0.0 { -1.0 } else { 1.0 };
        let e: f64 = self
            .exponential
            .iter()
            .map(|m| {
                let rate = sign / m.decay_time;
                m.amplitude * rate.powi(order as i32) * (-t.abs() / m.decay_time).exp()
            })
            .sum();
        Ok(c + e)
    }

    /// Laplace transform ∫₀^∞ e^{-st} Ψ(t) dt, closed form, for `s >= 0`.
    ///
    /// At `s = 0` this is the one-sided limit: zero for cosine modes and
    /// `A τ` for exponential modes.
    pub fn laplace(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "Laplace argument must be nonnegative, got {s}");
        let c: f64 = self
            .cosine
            .iter()
            .map(|m| m.amplitude * s / (s * s + m.angular_frequency * m.angular_frequency))
            .sum();
        let e: f64 = self
            .exponential
            .iter()
            .map(|m| m.amplitude * m.decay_time / (1.0 + s * m.decay_time))
            .sum();
        c + e
    }
}

/// Parameters of the transverse-field quantum Ising chain (T = 0, periodic
/// boundary conditions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingChainParams {
    #[serde(rename = "J")]
    pub coupling: f64,
    #[serde(rename = "gamma0")]
    pub field: f64,
    #[serde(rename = "N")]
    pub spin_count: usize,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl IsingChainParams {
    pub fn new(coupling: f64, field: f64, spin_count: usize, hbar: f64) -> Self {
        Self {
            coupling,
            field,
            spin_count,
            hbar,
        }
    }

    pub fn validate(&self) -> Result<(), RelaxationError> {
        let bad = |msg: String| Err(RelaxationError::InvalidIsingParams(msg));
        if !(self.coupling.is_finite() && self.coupling > 0.0) {
            return bad(format!("J must be positive, got {}", self.coupling));
        }
        if !(self.field.is_finite() && self.field >= 0.0) {
            return bad(format!("gamma0 must be nonnegative, got {}", self.field));
        }
        if self.spin_count < 2 || !self.spin_count.is_multiple_of(2) {
            return bad(format!("N must be even and >= 2, got {}", self.spin_count));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return bad(format!("hbar must be positive, got {}", self.hbar));
        }
        Ok(())
    }

    /// Quasiparticle energy ε(n) = 2 sqrt(J² + Γ₀² − 2JΓ₀ cos((2n−1)π/N)).
    pub fn epsilon(&self, n: usize) -> f64 {
        let (j, g) = (self.coupling, self.field);
        let theta = (2 * n - 1) as f64 * PI / self.spin_count as f64;
        2.0 * (j * j + g * g - 2.0 * j * g * theta.cos()).max(0.0).sqrt()
    }
}

/// Relaxation function of the Ising chain: N/2 cosine modes with
/// frequency 2ε(n)/ħ and amplitude (16/N)(J²/ε³(n)) sin²((2n−1)π/N).
pub fn make_ising_spectrum(params: &IsingChainParams) -> Result<RelaxationSpectrum, RelaxationError> {
    params.validate()?;
    let n_spins = params.spin_count as f64;
    let scale = params.coupling.max(params.field);
    let mut modes = Vec::with_capacity(params.spin_count / 2);
    for n in 1..=params.spin_count / 2 {
        let eps = params.epsilon(n);
        if eps <= 1e-12 * scale {
            return Err(RelaxationError::DegenerateSpectrum { n, epsilon: eps });
        }
        let theta = (2 * n - 1) as f64 * PI / n_spins;
        let amplitude =
            16.0 / n_spins * params.coupling.powi(2) / eps.powi(3) * theta.sin().powi(2);
        modes.push(CosineMode::new(amplitude, 2.0 * eps / params.hbar)?);
    }
    RelaxationSpectrum::new(modes, Vec::new())
}
