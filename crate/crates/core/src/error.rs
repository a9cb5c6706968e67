use thiserror::Error;

/// Failures raised by the solvers and reference evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision error: {what} (estimate {estimate:.3e} exceeds tolerance {tolerance:.3e})")]
    Precision {
        what: String,
        estimate: f64,
        tolerance: f64,
    },

    #[error("coefficient error: {0}")]
    Coefficient(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("contour error: {0}")]
    Contour(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last sup-change {last_change:.3e})")]
    NonConvergence { iterations: usize, last_change: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
