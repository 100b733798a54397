use std::path::PathBuf;

use thiserror::Error;

/// Process exit status for a verdict of reject.
pub const EXIT_REJECT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("{0}")]
    Usage(String),

    #[error("invalid {key}: {message}")]
    InvalidValue { key: String, message: String },

    #[error("{key} does not apply to {command}")]
    NotApplicable { key: String, command: &'static str },

    #[error("cannot read {}: {source}", path.display())]
    ConfigRead { path: PathBuf, source: std::io::Error },

    #[error("malformed {}: {message}", path.display())]
    ConfigSyntax { path: PathBuf, message: String },

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("empty plot series")]
    EmptySeries,

    #[error(transparent)]
    Run(#[from] hetverify::Error),
}

impl CliError {
    /// 0 for help and version output, 1 for usage problems, 3 for failures
    /// after the run started.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_)
            | CliError::Usage(_)
            | CliError::InvalidValue { .. }
            | CliError::NotApplicable { .. }
            | CliError::ConfigRead { .. }
            | CliError::ConfigSyntax { .. } => 1,
            CliError::Io { .. } | CliError::EmptySeries | CliError::Run(_) => 3,
        }
    }
}
