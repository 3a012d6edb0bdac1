//! Command-line front end for `ffa-core`.
//!
//! Every command produces one data table (CSV by default) and, when written
//! to a file, a JSON sidecar `<out>.meta.json` with the resolved
//! configuration, the library version and derived quantities. Feeding the
//! sidecar back through `--config` reproduces the data byte for byte.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

pub use commands::run;
pub use config::{CommandKind, Format, RawConfig, RunConfig};
pub use output::{write_outputs, Cell, RunOutput, Table};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<ffa_core::FfaError> for CliError {
    fn from(e: ffa_core::FfaError) -> Self {
        CliError::Numerical(e.to_string())
    }
}
