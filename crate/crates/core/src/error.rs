use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The mixture complement of a single-component model is empty.
    #[error("mixture complement undefined for a single-component model")]
    UndefinedComplement,

    /// Adaptive quadrature ran out of subdivisions. Carries the best estimate so far.
    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} ({reason})")]
    NonConvergence {
        estimate: f64,
        error: f64,
        reason: String,
    },

    #[error("integrand returned a non-finite value at x = {at:e}")]
    NonFiniteIntegrand { at: f64 },

    #[error("Monte Carlo integrand returned NaN on sample {index}")]
    PoisonedSample { index: u64 },

    /// Two independent computation routes disagree beyond their combined error.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// True for errors raised by numerical machinery rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NonFiniteIntegrand { .. }
                | Error::PoisonedSample { .. }
                | Error::InternalConsistency(_)
        )
    }
}
