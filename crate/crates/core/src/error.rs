use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("illegal action {action} in current position")]
    IllegalAction { action: usize },

    #[error("board parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("tensor shape mismatch: expected {expected} values, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("non-finite {what} during training: {detail}")]
    NonFinite { what: &'static str, detail: String },

    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error("checkpoint {path}: unsupported format version {found} (expected {expected})")]
    CheckpointVersion {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("experience buffer is empty")]
    EmptyBuffer,

    #[error("invalid statistics input: {0}")]
    Statistics(String),

    #[error("metrics file {path}, line {line}: {message}")]
    Metrics {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
