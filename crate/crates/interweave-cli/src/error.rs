//! CLI error taxonomy mapped onto process exit codes.

use std::fmt;

/// Exit codes: 0 success, 1 configuration error, 2 invariant breach,
/// 3 statistical-check failure.
#[derive(Debug)]
pub enum CliError {
    /// Bad or missing configuration, unreadable inputs, unwritable outputs.
    Config(String),
    /// An internal invariant failed (e.g. region containment) — a bug or a
    /// scenario outside the model's regime, never silently ignored.
    Invariant(String),
    /// A statistical acceptance check failed (|z| beyond threshold).
    Statistical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        CliError::Invariant(msg.into())
    }

    pub fn statistical(msg: impl Into<String>) -> Self {
        CliError::Statistical(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::Statistical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Invariant(msg) => write!(f, "invariant breach: {msg}"),
            CliError::Statistical(msg) => write!(f, "statistical check failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

impl From<interweave_core::Error> for CliError {
    fn from(e: interweave_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
