use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by the whole crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Caller violated a documented precondition (bad coordinate, bad
    /// parameter range, mismatched alphabets, ...).
    Usage(String),
    /// Input text could not be parsed; carries a 1-based line and token
    /// offset within that line.
    Parse { line: usize, offset: usize, msg: String },
    /// No single-entry change can destroy the given copy without creating a
    /// new one. Reachable only when a non-removable pattern is forced through
    /// a path that requires removability.
    NoSafeFlip { start: Vec<usize> },
    /// An exhaustive search exceeded its declared budget.
    BudgetExceeded(String),
    /// The d-dimensional deletion procedure exceeded its flip cap, which
    /// signals non-removable behaviour of the pattern.
    IterationCapExceeded { flips: u64, cap: u64 },
    /// A generator was asked for an instance that cannot exist.
    Infeasible(String),
    /// A verified-by-construction step failed its final check. Indicates a
    /// bug, never expected in normal operation.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::Parse { line, offset, msg } => {
                write!(f, "parse error at line {line}, token {offset}: {msg}")
            }
            Error::NoSafeFlip { start } => {
                write!(f, "no safe flip exists for the copy starting at {start:?}")
            }
            Error::BudgetExceeded(msg) => write!(f, "budget exceeded: {msg}"),
            Error::IterationCapExceeded { flips, cap } => {
                write!(f, "deletion procedure exceeded its flip cap ({flips} flips, cap {cap})")
            }
            Error::Infeasible(msg) => write!(f, "infeasible request: {msg}"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
