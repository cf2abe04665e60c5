//! Universal shortcuts to adiabaticity for weakly driven, thermally isolated
//! systems.
//!
//! In linear response the excess work of a drive `λ(t) = λ₀ + g(t) δλ` is a
//! quadratic functional of `ġ` with the relaxation function Ψ as kernel. For a
//! finite cosine spectrum a ramp plus an antisymmetric comb of even Dirac-delta
//! derivatives at the endpoints makes it vanish for every switching time.
//!
//! * [`relaxation`]: spectra, including the transverse-field Ising chain
//! * [`series`]: Laurent coefficients of `1/(s·L{Ψ̈})` and the waiting time
//! * [`protocol`]: piecewise-linear plus comb protocols and their transforms
//! * [`work`]: spectral excess work, the mollified quadrature check, and the
//!   Euler-Lagrange residual
//! * [`shortcut`]: the comb solver and switching-time scans

// `!(x > 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod protocol;
pub mod relaxation;
pub mod series;
pub mod shortcut;
pub mod work;

pub use protocol::{Protocol, ProtocolError, SingularTerm};
pub use relaxation::{
    make_ising_spectrum, CosineMode, ExponentialMode, IsingChainParams, RelaxationError,
    RelaxationSpectrum,
};
pub use series::{
    is_shortcut_candidate, laurent_coefficients, waiting_time, SeriesCoefficients, SeriesError,
};
pub use shortcut::{
    asymptotic_decay_check, build_shortcut, solve_comb, verify_shortcut, CombSolution,
    ShortcutCheck, ShortcutError,
};
pub use work::{
    euler_lagrange_residual, excess_work_quadrature, excess_work_spectral, optimal_excess_work,
    DriveParams, Method, WorkError, WorkResult,
};
