use std::path::PathBuf;

/// Errors raised across the HIF laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("scenario error: {0}")]
    Spec(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("window error: need at least {needed} samples, got {got}")]
    Window { needed: usize, got: usize },

    #[error("record error: {0}")]
    Record(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ranking error: {0}")]
    Ranking(String),

    #[error("neighbor error: minority class has {have} points, need more than k = {k}")]
    Neighbor { have: usize, k: usize },

    #[error("fold error: {0}")]
    Fold(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl std::fmt::Display) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.to_string(),
        }
    }
}
