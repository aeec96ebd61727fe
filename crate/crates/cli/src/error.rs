use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error("{path}: unknown key (line {line}): {message}")]
    UnknownKey { path: PathBuf, line: usize, message: String },

    #[error("missing required config keys: {}", .0.join(", "))]
    MissingKeys(Vec<&'static str>),

    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("refusing to write non-finite value in column `{column}` at row {row}")]
    NonFinite { column: String, row: usize },

    #[error("check failed: {0}")]
    Check(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] cavity_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
