//! Command-line driver: mesh generation, solving, certification and
//! reporting.

pub mod args;
pub mod commands;
pub mod config;
pub mod expr;
pub mod problem;

use std::path::{Path, PathBuf};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const PICARD_DIVERGED: i32 = 2;
    pub const LINEAR_DIVERGED: i32 = 3;
    pub const CERTIFICATE_FAILED: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] dmpfem::Error),
    #[error("certificate failed: {0}")]
    CertificateFailed(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(dmpfem::Error::PicardDiverged { .. }) => exit::PICARD_DIVERGED,
            CliError::Core(dmpfem::Error::LinearSolveDiverged { .. }) => exit::LINEAR_DIVERGED,
            CliError::CertificateFailed(_) => exit::CERTIFICATE_FAILED,
            _ => exit::USAGE,
        }
    }
}

/// Caps the rayon pool at `DMPFEM_THREADS` workers; `0` or unset keeps the
/// default.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(value) = value else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("DMPFEM_THREADS must be a non-negative integer, got `{value}`")))?;
    if n > 0 {
        // A pool that is already initialised keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let picard = CliError::Core(dmpfem::Error::PicardDiverged { iterations: 0, update: f64::INFINITY });
        let linear = CliError::Core(dmpfem::Error::LinearSolveDiverged { residual: 1.0, iterations: 3 });
        assert_eq!(picard.exit_code(), 2);
        assert_eq!(linear.exit_code(), 3);
        assert_eq!(CliError::CertificateFailed("x".into()).exit_code(), 4);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(dmpfem::Error::NotConverged).exit_code(), 1);
    }

    #[test]
    fn thread_variable_parsing() {
        assert!(configure_threads(None).is_ok());
        assert!(configure_threads(Some("0")).is_ok());
        assert!(configure_threads(Some("many")).is_err());
        assert!(configure_threads(Some("-1")).is_err());
    }
}
