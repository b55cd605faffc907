use thiserror::Error;

pub type Result<T> = std::result::Result<T, ModelError>;

/// Validation failures raised anywhere in the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("branch probabilities at node {path} sum to {sum}, expected 1")]
    ProbabilitySum { path: String, sum: f64 },

    #[error("invalid tree at node {path}: {reason}")]
    InvalidTree { path: String, reason: String },

    #[error("stage {stage} is outside 1..={steps}")]
    StageOutOfRange { stage: u32, steps: f64 },

    #[error("{0}")]
    Unsupported(String),

    #[error("malformed tree specification: {0}")]
    Parse(String),
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonFinite { name, value })
    }
}

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> ModelError {
    ModelError::InvalidParameter {
        name,
        value,
        reason,
    }
}

/// Checks `0 < p < 1`.
pub(crate) fn open_unit(name: &'static str, p: f64) -> Result<f64> {
    finite(name, p)?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(invalid(name, p, "must lie strictly between 0 and 1"))
    }
}
