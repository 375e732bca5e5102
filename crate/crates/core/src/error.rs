use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RlwError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown configuration key `{key}`")]
    UnknownKey { key: String },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("singular system: pivot {pivot:e} below threshold {threshold:e} at row {row}")]
    Singular {
        row: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("scheme state is missing the {0} level")]
    MissingLevel(&'static str),

    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<RlwError>,
    },
}

impl RlwError {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        RlwError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_step(self, step: usize, time: f64) -> Self {
        RlwError::Step {
            step,
            time,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, RlwError>;
