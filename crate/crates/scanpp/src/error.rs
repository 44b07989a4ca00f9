//! Error type shared across the crate.

use thiserror::Error;

/// Unified error type for every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside its mathematical domain (query point outside
    /// the window continuum, non-positive rate, level outside (0,1), ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A simulation design or constructor argument is structurally invalid
    /// (overlapping signal regions, negative intensity, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input data could not be parsed or violates the data contract; the
    /// message carries the offending line number where applicable.
    #[error("input error: {0}")]
    Input(String),

    /// A run configuration is internally inconsistent (statistic incompatible
    /// with the test mode, missing bandwidth, ...).
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line driver: `2` for bad input data,
    /// `3` for bad configuration or parameters (`0` is success).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
