use thiserror::Error;

use crate::solvers::RunTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The iterate left the finite region. The trace holds every record
    /// produced before the failure.
    #[error("iterate diverged at iteration {iteration}")]
    Diverged {
        iteration: usize,
        trace: Box<RunTrace>,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by the caller's inputs or configuration rather
    /// than by the run itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Parse { .. } | Error::Config(_)
        )
    }
}
