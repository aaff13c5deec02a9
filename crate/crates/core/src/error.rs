use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// LU elimination met a pivot below the singularity threshold.
    #[error("singular matrix: pivot {pivot} has magnitude {magnitude:e}")]
    SingularMatrix { pivot: usize, magnitude: f64 },

    #[error("exhaustive enumeration of {subsets} subsets exceeds the budget of {budget}; use sampled mode")]
    BudgetExceeded { subsets: u128, budget: u128 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Short machine-readable tag, used in CSV error columns and CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::BudgetExceeded { .. } => "budget_exceeded",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
