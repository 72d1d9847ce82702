use necklace_core::NecklaceError;
use std::fmt;

/// Failure classes, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input, violated precondition.
    Input(String),
    NotRealisable(String),
    Verification(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::NotRealisable(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::NotRealisable(m) => write!(f, "{m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<NecklaceError> for CliError {
    fn from(e: NecklaceError) -> Self {
        match e {
            NecklaceError::NotRealisable { .. } => CliError::NotRealisable(e.to_string()),
            NecklaceError::Instance(_) => CliError::Input(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Other(format!("json error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Other(format!("csv error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
