use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("pair ({left}, {right}) is not a normalized su(2) pair: {reason}")]
    NotSu2 {
        left: String,
        right: String,
        reason: String,
    },

    #[error("unassigned control labels: {}", .0.join(", "))]
    UnassignedLabels(Vec<String>),

    #[error("labels {0} and {1} must share one error group")]
    UngroupedLabels(String, String),

    #[error(
        "replacement does not reproduce pulse {label} at angle {angle}: distance {distance:e}"
    )]
    IdealActionMismatch {
        label: String,
        angle: f64,
        distance: f64,
    },

    #[error("not unitary: |U^dag U - I| = {0:e}")]
    NotUnitary(f64),

    #[error("basis is not orthonormal: deviation {0:e}")]
    NotOrthonormal(f64),

    #[error("≥4 points required for fit, found {0} in window")]
    TooFewPoints(usize),

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("compile failed at eps = {eps:e}: {source}")]
    AtPoint {
        eps: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
