use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Structural input problem (lengths, empty inputs, mismatched grids).
    #[error("invalid input: {0}")]
    Input(String),

    /// A series or quadrature did not reach its tolerance.
    #[error("{what} did not converge (partial value {partial:e})")]
    NoConvergence { what: &'static str, partial: f64 },

    /// The explicit scheme blew up.
    #[error("instability at step {step}: max |U| = {max_abs:e} exceeds {limit:e}")]
    Instability {
        step: usize,
        max_abs: f64,
        limit: f64,
    },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}
