//! Crate-wide error type.

use thiserror::Error;

use crate::crowd::AdmissionRecord;

#[derive(Debug, Error)]
pub enum WocceError {
    /// Malformed input file (bad cell, ragged row, ...).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Dimension or count mismatch between related inputs.
    #[error("size error: {0}")]
    Size(String),

    /// Invalid configuration (unknown algorithm, bad threshold, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Operation undefined for the given inputs (e.g. empty reference set).
    #[error("domain error: {0}")]
    Domain(String),

    /// A model fit collapsed and could not be recovered.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Two values that must agree by construction do not.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// Every candidate was rejected; the admission log explains why.
    #[error("no wise crowd: all {} candidates rejected (thresholds too strict)", log.len())]
    NoWiseCrowd { log: Vec<AdmissionRecord> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, WocceError>;
