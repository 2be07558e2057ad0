//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a physical or numerical precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A value object could not be built from its parts.
    #[error("construction error: {0}")]
    Construction(String),

    /// The cooling stroke never reached the closure threshold.
    #[error("cycle closure not reached within {horizon_ms} ms")]
    Closure { horizon_ms: f64 },

    /// The nonlinear fit failed to converge from every start.
    #[error("fit did not converge (best residual {best_residual:e})")]
    Fit { best_residual: f64 },

    /// A query fell outside the range of an interpolation table.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Configuration file problem.
    #[error("config error: {0}")]
    Config(String),

    /// A plot was requested for an empty curve.
    #[error("empty curve")]
    EmptyCurve,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Machine-readable category, stable across releases.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Dimension { .. } => "dimension",
            Error::Construction(_) => "construction",
            Error::Closure { .. } => "closure",
            Error::Fit { .. } => "fit",
            Error::OutOfRange(_) => "range",
            Error::Config(_) => "config",
            Error::EmptyCurve => "empty-curve",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code for the CLI, nonzero per category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Domain(_) | Error::Dimension { .. } | Error::Construction(_) => 3,
            Error::Io(_) => 4,
            Error::Fit { .. } => 5,
            Error::Closure { .. } => 6,
            Error::OutOfRange(_) | Error::EmptyCurve => 7,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
