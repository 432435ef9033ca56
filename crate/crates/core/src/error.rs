use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the planning stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config dimension mismatch: expected {expected}, got {got}")]
    ConfigDimension { expected: usize, got: usize },

    #[error("interpolation parameter {0} outside [0, 1]")]
    InterpolationParameter(f64),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error in {field}: {message}")]
    Validation { field: String, message: String },

    #[error("unsupported format_version {found} (supported: {supported})")]
    FormatVersion { found: i64, supported: i64 },

    #[error("checksum mismatch: file is truncated or corrupted")]
    Checksum,

    #[error("weight magnitude must be ≥ 1 (got {0})")]
    InvalidWeight(f64),

    #[error("path too short: need at least 2 configurations, got {0}")]
    PathTooShort(usize),

    #[error("resolution must be positive (got {0})")]
    InvalidResolution(f64),

    #[error("no path between start and goal")]
    NoPath,

    #[error("scene appears infeasible: {0}")]
    Infeasible(String),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the environment (files, streams) rather
    /// than by the planning problem itself.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Csv(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
