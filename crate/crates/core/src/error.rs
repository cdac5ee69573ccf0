use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("dimension d = {d} is not supported here ({reason})")]
    UnsupportedDimension { d: usize, reason: &'static str },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("{what} did not converge: achieved error {achieved:e}, requested {requested:e}")]
    NumericalFailure {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },

    #[error("malformed sample dump: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }

    /// True for errors that stem from numerical non-convergence rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalFailure { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
