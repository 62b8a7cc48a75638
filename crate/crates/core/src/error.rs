use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a documented invariant. `field` is a dotted path into
    /// the scenario or config document.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("parse error: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("integration failed at step {step} (t = {time} days): non-finite state")]
    Integration { step: usize, time: f64 },

    #[error("cannot derive phase schedule: {0}; supply explicit `boundaries` instead")]
    ScheduleDerivation(String),

    #[error("path space has {size} paths, above the enumeration limit of {limit}; use the dp method")]
    Capacity { size: u128, limit: u128 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Errors caused by bad input rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Parse { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
