use thiserror::Error;

use crate::moment::ConeVerdict;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A realizability or synthesis request was declined; the verdict that
    /// caused the refusal is attached when one was computed.
    #[error("refused: {reason}")]
    Refusal {
        reason: String,
        verdict: Option<Box<ConeVerdict>>,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("containment precondition violated: {0}")]
    ContainmentViolated(String),

    #[error("search budget exhausted after {0} evaluations")]
    BudgetExhausted(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn refusal(reason: impl Into<String>, verdict: Option<ConeVerdict>) -> Self {
        Error::Refusal {
            reason: reason.into(),
            verdict: verdict.map(Box::new),
        }
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
