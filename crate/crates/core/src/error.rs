use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid uniform draw {0}: must lie strictly inside (0, 1)")]
    InvalidDraw(f64),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("infeasible family: {0}")]
    Infeasible(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("enumeration refused: more than {budget} members")]
    EnumerationRefused { budget: u64 },
    #[error("refused: {0}")]
    Refused(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by a configured size cap rather than bad input.
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::EnumerationRefused { .. } | Error::Refused(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
