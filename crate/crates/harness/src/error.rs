use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] frac_l1::Error),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: frac_l1::Error,
    },
    #[error("rate fit: {0}")]
    Fit(String),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error at {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("JSON error at {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl HarnessError {
    /// Process exit code: 1 configuration, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Numerical(_) | HarnessError::Context { .. } | HarnessError::Fit(_) => 2,
            HarnessError::Io { .. } | HarnessError::Csv { .. } | HarnessError::Json { .. } => 3,
        }
    }

    pub(crate) fn context(context: impl Into<String>) -> impl FnOnce(frac_l1::Error) -> Self {
        let context = context.into();
        move |source| HarnessError::Context { context, source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
