use hiflab_core::Error as CoreError;

/// Failures sorted by the exit status they map to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, bad configuration, or a malformed config file.
    #[error("{0}")]
    Usage(String),
    /// Missing or malformed inputs, or data the pipeline cannot work with.
    #[error("{0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(_) => CliError::Usage(e.to_string()),
            CoreError::InvalidInput(_)
            | CoreError::Spec(_)
            | CoreError::Window { .. }
            | CoreError::Record(_)
            | CoreError::Domain(_)
            | CoreError::Ranking(_)
            | CoreError::Neighbor { .. }
            | CoreError::Fold(_)
            | CoreError::InsufficientData(_)
            | CoreError::Parse { .. }
            | CoreError::Io { .. } => CliError::Data(e.to_string()),
        }
    }
}

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}
