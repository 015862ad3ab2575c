use std::path::PathBuf;

use crate::formats::FormatError;

/// Everything that can stop a command, mapped onto the process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("invalid input:\n{}", bullet_list(.0))]
    Validation(Vec<String>),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error("numerical failure: {0}")]
    Numeric(#[from] gaugeqm_core::Error),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Failure {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Validation(vec![msg.into()])
    }

    /// 1 validation (including unreadable inputs), 2 numeric, 3 verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) | Failure::Io { .. } | Failure::Format(_) => 1,
            Failure::Numeric(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

fn bullet_list(items: &[String]) -> String {
    items.iter().map(|s| format!("  - {s}")).collect::<Vec<_>>().join("\n")
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Failure {
    let path = path.into();
    move |source| Failure::Io { path, source }
}
