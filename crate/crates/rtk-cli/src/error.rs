//! CLI error classes mapped to process exit codes.

use thiserror::Error;

/// Exit code classes: parse/validation failures are 2, violated solver
/// preconditions 3, convergence failures 4, acceptance-check failures 5.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("precondition violated: {0}")]
    Precondition(rtk_core::Error),
    #[error("convergence failure: {0}")]
    Convergence(rtk_core::Error),
    #[error("acceptance check failed: {0}")]
    Acceptance(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> CliError {
        CliError::Validation(message.into())
    }

    pub fn acceptance(message: impl Into<String>) -> CliError {
        CliError::Acceptance(message.into())
    }

    /// Classifies a solver error: iteration budgets map to the convergence
    /// class, everything else to violated preconditions.
    pub fn precondition(err: rtk_core::Error) -> CliError {
        match err {
            rtk_core::Error::ConvergenceFailure { .. }
            | rtk_core::Error::MaxIterationsExceeded { .. } => CliError::Convergence(err),
            other => CliError::Precondition(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Convergence(_) => 4,
            CliError::Acceptance(_) => 5,
            CliError::Io(_) => 2,
        }
    }
}

impl From<rtk_core::Error> for CliError {
    fn from(err: rtk_core::Error) -> CliError {
        CliError::precondition(err)
    }
}
