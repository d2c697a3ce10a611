use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by kernel evaluation, operators and synthesis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {point} lies outside the admissible domain {domain}")]
    Domain { point: Complex64, domain: &'static str },

    #[error("series truncation needs half-width {required} but the cap is {cap}")]
    TruncationFailure { required: usize, cap: usize },

    #[error("|z^2 + conj(w)^2| = {modulus:e} is too close to a pole")]
    PoleProximity { modulus: f64 },

    #[error("quadrature did not converge on [{a}, {b}] after {levels} refinement levels")]
    QuadratureFailure { a: f64, b: f64, levels: usize },

    #[error("matrix G + lambda*I is not positive definite (last lambda tried: {lambda:e})")]
    IllConditioned { lambda: f64 },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("kernel evaluation failed at entry ({row}, {col}): {source}")]
    GramEntry {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::TruncationFailure { .. }
            | Error::PoleProximity { .. }
            | Error::QuadratureFailure { .. }
            | Error::IllConditioned { .. } => true,
            Error::GramEntry { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
