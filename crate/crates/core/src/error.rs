use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A domain type was constructed with values violating its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// Test functions were handed to an operation expecting the other wedge.
    #[error("wedge mismatch: {0}")]
    WedgeMismatch(String),

    /// A parameter vector does not match the objective it is fed to.
    #[error("dimension mismatch: expected {expected} parameters, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unknown table row {0} (rows are numbered 1 to 4)")]
    UnknownRow(usize),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
