//! Front-end errors, their exit statuses and the JSON lines written to stderr.

use std::path::PathBuf;

use dcspec_core::{Error as CoreError, ErrorKind};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Schema {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::DegenerateSpectrum => 4,
            },
            CliError::Output(_) => 3,
            CliError::Io { .. } | CliError::Schema { .. } | CliError::Usage(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            3 => "numerical",
            4 => "degenerate_spectrum",
            _ => "input",
        }
    }

    /// Stable machine-readable tag for the failure.
    pub fn reason(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                CoreError::DimensionMismatch { .. } => "dimension_mismatch",
                CoreError::InvalidDegree(_) => "invalid_degree",
                CoreError::InvalidInput(_) => "invalid_input",
                CoreError::Domain(_) => "domain",
                CoreError::NonConvergence(_) => "non_convergence",
                CoreError::Linalg(_) => "linalg",
                CoreError::DegenerateSpectrum(_) => "degenerate_spectrum",
                CoreError::PreconditionViolated(_) => "precondition_violated",
                CoreError::DeltaTooLarge { .. } => "delta_too_large",
                CoreError::InvalidPhase(_) => "invalid_phase",
                CoreError::NoPhase => "no_phase",
                CoreError::NotCanonical { .. } => "not_canonical",
                CoreError::NotFbiPhase(_) => "not_fbi_phase",
                CoreError::InSingularSpace => "in_singular_space",
            },
            CliError::Io { .. } => "io",
            CliError::Schema { .. } => "schema",
            CliError::Usage(_) => "usage",
            CliError::Output(_) => "output",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "level": "error",
            "kind": self.kind(),
            "reason": self.reason(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Schema { path, line, column, .. } = self {
            v["path"] = json!(path.display().to_string());
            v["line"] = json!(line);
            v["column"] = json!(column);
        }
        v
    }
}

/// Writes one JSON object per line to stderr.
pub fn emit(v: &Value) {
    eprintln!("{v}");
}
