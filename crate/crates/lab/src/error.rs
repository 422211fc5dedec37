use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] psgrowth_core::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

impl LabError {
    /// Process exit code: 2 budget exceeded, 3 invalid config, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use psgrowth_core::Error as E;
        match self {
            LabError::Core(E::BudgetExceeded { .. }) => 2,
            LabError::Config(_)
            | LabError::Core(E::InvalidSpec(_))
            | LabError::Core(E::InvalidWord { .. })
            | LabError::Core(E::Unsupported(_))
            | LabError::Core(E::OutOfRange(_))
            | LabError::Core(E::Precondition(_)) => 3,
            _ => 1,
        }
    }
}
