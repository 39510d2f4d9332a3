use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The caller passed something that violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The operation does not apply to this input (size cap, too-small region, ...).
    #[error("not applicable: {0}")]
    NotApplicable(String),
    /// A decision oracle gave answers that cannot all be true.
    #[error("oracle fault: {0}")]
    OracleFault(String),
    /// A separation provider returned something that is not a valid separation.
    #[error("protocol error: {0}")]
    Protocol(String),
    /// The exact search exceeded its node-expansion budget.
    #[error("search budget of {0} expansions exceeded")]
    BudgetExceeded(u64),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn not_applicable<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::NotApplicable(msg.into()))
}
