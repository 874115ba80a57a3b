use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("attitude singularity: pitch {pitch} rad is within {guard} rad of +/-pi/2")]
    Singularity { pitch: f64, guard: f64 },

    #[error("invalid physical parameters: {0}")]
    PhysicalParams(String),

    #[error("invalid gains: {0}")]
    Gains(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("config invalid: {rule}")]
    ConfigInvalid { rule: String },

    #[error("trace is empty")]
    EmptyTrace,

    #[error("malformed trace {path}: {reason}")]
    TraceFormat { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(rule: impl Into<String>) -> Self {
        Error::ConfigInvalid { rule: rule.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
