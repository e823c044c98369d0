//! Scenario configuration, experiment execution, and figure-data emission
//! for the focuslab models.

pub mod config;
pub mod manifest;
pub mod output;
pub mod runner;

use std::fmt;

/// Process-level error classes; each maps to a distinct exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration (exit code 1).
    Config(String),
    /// Runtime or numerical failure (exit code 2).
    Runtime(String),
    /// Filesystem failure (exit code 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<focuslab_core::Error> for CliError {
    fn from(e: focuslab_core::Error) -> Self {
        match e {
            focuslab_core::Error::Config(m) => CliError::Config(m.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
