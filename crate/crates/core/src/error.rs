use thiserror::Error;

use crate::distributions::OrderingRegime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A user-supplied value is out of range or malformed.
    #[error("invalid value for `{field}`: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid cost model: {0}")]
    InvalidCost(String),

    /// A root could not be bracketed inside the quantity domain.
    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    SolverDomain { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The likelihood ratio is neither non-decreasing nor non-increasing.
    #[error("likelihood ratio is not monotone; no characterization is available for this pair")]
    UnsupportedOrdering,

    #[error("operation requires {expected:?} ordering but the pair is {found:?}")]
    RegimeMismatch {
        expected: OrderingRegime,
        found: OrderingRegime,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("menu schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
