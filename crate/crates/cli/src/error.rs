use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A config field failed validation. `path` is the dotted field path.
    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error("{path}: invalid JSON: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("configurations differ in shared fields: {}", .0.join(", "))]
    ConfigMismatch(Vec<String>),

    #[error(transparent)]
    Numeric(#[from] nwv_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for config problems, 3 for numeric failures,
    /// 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Parse { .. } | Self::ConfigMismatch(_) => 2,
            Self::Numeric(_) => 3,
            Self::Io { .. } => 4,
        }
    }
}
