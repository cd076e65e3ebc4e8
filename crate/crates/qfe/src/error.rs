//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by model validation and numerical evaluation.
#[derive(Debug, Error)]
pub enum QfeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid correlation matrix: {0}")]
    InvalidCorrelation(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("grid resolution error: {0}")]
    GridResolution(String),
    #[error("singular modular flow: {0}")]
    SingularModularFlow(String),
    #[error("relative entropy undefined: {0}")]
    UndefinedRelativeEntropy(String),
    #[error("noncommuting partition: {0}")]
    NoncommutingPartition(String),
}

impl QfeError {
    /// Process exit code used by the CLI: 2 validation, 3 numeric, 4 resource.
    pub fn exit_code(&self) -> i32 {
        match self {
            QfeError::InvalidArgument(_)
            | QfeError::InvalidModel(_)
            | QfeError::InvalidCorrelation(_)
            | QfeError::GridResolution(_)
            | QfeError::NoncommutingPartition(_) => 2,
            QfeError::Numeric(_)
            | QfeError::SingularModularFlow(_)
            | QfeError::UndefinedRelativeEntropy(_) => 3,
            QfeError::ResourceLimit(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, QfeError>;
