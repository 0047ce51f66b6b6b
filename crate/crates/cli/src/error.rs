use std::path::PathBuf;

use peakspread_core::{CalibrationError, FormatError, ModelError, SimulationError, SynthesisError};
use thiserror::Error;

/// Everything a subcommand can fail with, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps a format error raised while reading `path`.
    pub fn format(path: impl Into<PathBuf>, err: FormatError) -> Self {
        let path = path.into();
        match err {
            FormatError::Io(source) => CliError::Io { path, source },
            e if e.is_io() => CliError::Io {
                path,
                source: std::io::Error::other(e.to_string()),
            },
            e => CliError::Validation(format!("{}: {e}", path.display())),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        match e {
            SynthesisError::PreferredNotReached { .. } => CliError::Infeasible(e.to_string()),
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl From<CalibrationError> for CliError {
    fn from(e: CalibrationError) -> Self {
        match e {
            CalibrationError::Infeasible { .. } | CalibrationError::Numeric(_) => {
                CliError::Infeasible(e.to_string())
            }
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        CliError::Validation(e.to_string())
    }
}
