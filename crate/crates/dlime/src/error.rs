//! Crate-wide error type and the process exit codes the CLI maps it to.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DlimeError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("CSV parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("external model transport error: {0}")]
    Transport(String),

    #[error("cluster {cluster_id} has only {size} rows; need at least 2 to fit a surrogate")]
    InsufficientCluster { cluster_id: usize, size: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl DlimeError {
    /// CLI exit code: 0 success, 2 usage/schema, 3 data, 4 model, 5 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            DlimeError::Usage(_) | DlimeError::Schema(_) => 2,
            DlimeError::Parse { .. } | DlimeError::Data(_) => 3,
            DlimeError::Model(_)
            | DlimeError::Transport(_)
            | DlimeError::InsufficientCluster { .. } => 4,
            DlimeError::Io(_) | DlimeError::Json(_) | DlimeError::Internal(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, DlimeError>;
