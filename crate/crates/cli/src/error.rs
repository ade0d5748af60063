use std::fmt;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed input, invalid state, or bad parameters.
    Validation(String),
    /// Wrong SLOCC class for the command, or an undetermined verdict.
    Verdict(String),
    /// A self-check or cross-check failed.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Verdict(_) => 3,
            Self::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid input: {m}"),
            Self::Verdict(m) => write!(f, "verdict: {m}"),
            Self::Internal(m) => write!(f, "internal inconsistency: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<slocc::Error> for CliError {
    fn from(e: slocc::Error) -> Self {
        use slocc::Error as E;
        match e {
            E::ClassMismatch { .. } | E::NormalFormObstruction => Self::Verdict(e.to_string()),
            E::InternalInconsistency(_) | E::BracketFailure(_) => Self::Internal(e.to_string()),
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Validation(e.to_string())
    }
}
