//! Numerical laboratory for Hankel and Toeplitz operators on the Hardy space H².
//!
//! The crate is organised bottom-up:
//!
//! - [`symbol`]: Fourier-coefficient algebra for bounded symbols on the unit
//!   circle, the Riesz projection, the flip operator and reproducing kernels.
//! - [`lang`]: a small expression language that lowers to [`Symbol`] values.
//! - [`operator`]: finite sections of Toeplitz, Hankel and rank-one operators,
//!   FFT application, singular values and the operator-identity verifier.
//! - [`diagnostics`]: radial sweeps of localized quantities such as
//!   `‖H_f k_z‖` and the compactness verdicts built on top of them.
//!
//! Conventions: `ĉ(n) = (1/2π)∫ f(e^{iθ}) e^{-inθ} dθ`, and the inner product
//! is conjugate-linear in the second slot so that `(x⊗y)h = ⟨h, y⟩ x`.

// `!(x > 0.0)` is used on purpose: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod lang;
pub mod operator;
pub mod symbol;

pub use num_complex::Complex64 as C64;

pub use diagnostics::{
    CaseLabel, Measured, PointDiagnostic, RadialNet, SweepCurve, Thresholds, TrendFit, Verdict, VerdictOutcome,
};
pub use error::{Error, Result};
pub use lang::{lower, parse, LoweringOptions, SymbolExpr};
pub use operator::{IdentityId, Provenance, ResidualReport, WindowedOperator};
pub use symbol::{CoeffVector, ConjMode, DiskPoint, Envelope, Laurent, Symbol, TwoSided};
