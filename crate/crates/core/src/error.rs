use std::path::PathBuf;

use thiserror::Error;

use crate::types::Axis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ensemble needs at least 2 passes, got {0}")]
    InsufficientEnsemble(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),

    #[error("sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),

    #[error("invalid interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {left} truths vs {right} intervals")]
    LengthMismatch { left: usize, right: usize },

    #[error("records mix axes: expected {expected}, found {found}")]
    MixedAxes { expected: Axis, found: Axis },

    #[error("moving-average window must be a positive odd integer, got {0}")]
    InvalidWindow(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no calibrator for axis {axis} at alpha={alpha}")]
    MissingCalibrator { axis: Axis, alpha: f64 },

    #[error("unknown axis label {0:?} (expected one of X, Y, Z, Roll, Pitch, Yaw)")]
    UnknownAxis(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
