use thiserror::Error;

use crate::lang::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("symbol decay exponent {exponent} is not above 1/2; Hankel tails cannot be certified")]
    UncertifiableEnvelope { exponent: f64 },

    #[error("product not certifiable: neither factor has a summable coefficient tail")]
    ProductNotCertifiable,

    #[error("window {window} too small for {what}: certified sub-window would need {needed} more degrees")]
    WindowTooSmall { what: String, window: usize, needed: usize },

    #[error("incompatible windows: operator acts on {expected} degrees, vector has {found}")]
    IncompatibleWindows { expected: usize, found: usize },

    #[error("point {0} is not strictly inside the unit disk")]
    OutsideDisk(num_complex::Complex64),

    #[error("invalid input: {0}")]
    Invalid(String),
}
