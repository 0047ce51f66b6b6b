use thiserror::Error;

use crate::time::TimeOfDay;

/// Errors from the time/money/cost model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid time: {0}")]
    InvalidTime(String),
    #[error("invalid amount: {0}")]
    InvalidAmount(String),
    #[error("fixed-point overflow")]
    Overflow,
    #[error("time {t} is outside the schedule domain [{start}, {end}]")]
    OutOfDomain {
        t: TimeOfDay,
        start: TimeOfDay,
        end: TimeOfDay,
    },
    #[error("invalid price schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid cost parameters: {0}")]
    InvalidParams(String),
    #[error("late arrival at {t} is prohibited for this motorist (preferred {preferred})")]
    LateArrivalProhibited { t: TimeOfDay, preferred: TimeOfDay },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Errors from arrival-map synthesis, induction and verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("invalid arrival map: {0}")]
    InvalidMap(String),
    #[error("invalid b grid: {0}")]
    InvalidGrid(String),
    #[error("schedule breakpoints do not match map slot times: {0}")]
    BreakpointMismatch(String),
    #[error("induced map ends at {last} but the preferred time is {preferred}; extend the b grid")]
    PreferredNotReached {
        last: TimeOfDay,
        preferred: TimeOfDay,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors from willingness-to-pay calibration and flow ingestion.
#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("no location parameter reproduces the ratio at sigma = {sigma}: {reason}")]
    Infeasible { sigma: f64, reason: String },
    #[error("invalid calibration input: {0}")]
    InvalidInput(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors from reading or writing the CSV interchange formats.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub(crate) fn at(line: u64, message: impl std::fmt::Display) -> Self {
        FormatError::Parse {
            line,
            message: message.to_string(),
        }
    }

    /// True when the failure came from the underlying reader rather than
    /// the file's content.
    pub fn is_io(&self) -> bool {
        match self {
            FormatError::Io(_) => true,
            FormatError::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            _ => false,
        }
    }
}

/// Errors from configuring or running the Monte Carlo engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
