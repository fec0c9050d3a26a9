use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpsError {
    /// A configuration value violates a constraint. `field` names the offending key.
    #[error("invalid configuration for `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("length mismatch: expected {expected} values, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error(
        "inner linear solve did not converge after {iterations} sweeps (residual {residual:.3e})"
    )]
    InnerSolve { iterations: usize, residual: f64 },

    #[error("gradient flow collapsed to the zero field")]
    Collapsed,

    #[error("singular tridiagonal system at row {row}")]
    Singular { row: usize },

    #[error("non-finite value encountered at t = {time}")]
    NonFinite { time: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SpsError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        SpsError::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SpsError>;
