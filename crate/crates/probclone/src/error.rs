use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything a command can fail with. [`CliError::exit_code`] maps each
/// variant onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Invalid { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("set is linearly dependent (minimum Gram eigenvalue {min_eigenvalue:.6e}), not clonable")]
    Dependent { min_eigenvalue: f64 },
    #[error("eta = {eta} is infeasible: minimum eigenvalue of X1 - eta*Xm is {min_eigenvalue:.6e}")]
    Infeasible { eta: f64, min_eigenvalue: f64 },
    #[error(transparent)]
    Core(#[from] probclone_core::Error),
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Dependent { .. } => 2,
            CliError::Infeasible { .. } => 3,
            CliError::Core(probclone_core::Error::DependentSet { .. }) => 2,
            CliError::Core(probclone_core::Error::Infeasible { .. }) => 3,
            _ => 1,
        }
    }
}
