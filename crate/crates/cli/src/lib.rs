//! Command implementations behind the `bloch-fiber` binary.

use std::path::{Path, PathBuf};

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Command};
pub use config::RunConfig;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "BLOCH_FIBER_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Check(_) | Self::Io { .. } => 1,
        }
    }
}

/// Worker count from [`THREADS_ENV`]; `None` when unset or not a positive
/// integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}
