use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error in record `{record}`: missing or malformed field `{field}`")]
    Schema { record: String, field: String },

    #[error("invariant violated in `{record}`: {rule}")]
    Invariant { record: String, rule: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("scheme error: {0}")]
    Scheme(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("integration failed at t = {t_ps} ps: {reason}")]
    Integration { t_ps: f64, reason: String },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("at snapshot {index}: {source}")]
    AtSnapshot {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown nuclide `{0}`")]
    UnknownNuclide(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invariant(record: impl Into<String>, rule: impl Into<String>) -> Self {
        Error::Invariant { record: record.into(), rule: rule.into() }
    }

    pub(crate) fn schema(record: impl Into<String>, field: impl Into<String>) -> Self {
        Error::Schema { record: record.into(), field: field.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
