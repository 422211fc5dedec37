use thiserror::Error;

/// Errors raised by the geometric and measure-theoretic routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration would exceed its configured element or path budget.
    #[error("budget exceeded while {what}: limit {limit}")]
    BudgetExceeded { what: &'static str, limit: usize },

    /// A query needs data beyond the enumerated radius.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A window-restricted object was evaluated outside of its window.
    #[error("point {0} lies outside the cocycle window")]
    OutOfWindow(String),

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    /// The requested operation has no exact model for this group kind.
    #[error("unsupported for this model: {0}")]
    Unsupported(String),

    #[error("horizon exhausted: {0}")]
    HorizonExhausted(String),

    /// Precondition of an operation was not met.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
