use std::path::Path;

use zeno_core::ZenoError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Every requested analysis failed.
    #[error("analysis failed: {0}")]
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parse { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Analysis(_) => 1,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, msg: impl ToString) -> Self {
        CliError::Parse {
            path: path.into(),
            msg: msg.to_string(),
        }
    }
}

impl From<ZenoError> for CliError {
    fn from(e: ZenoError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
