use thiserror::Error;

/// Errors raised across the crate.
///
/// Domain and mismatch errors are caller mistakes; quadrature failures are
/// numerical and carry whatever estimate was reached.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    Quadrature {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("parameter mismatch: {0}")]
    Mismatch(String),

    #[error("cache error: {0}")]
    Cache(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of a numerical routine rather than invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
