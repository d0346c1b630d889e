use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("term has total degree {0}, only quadratic terms are allowed")]
    InvalidDegree(u32),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parameter outside its domain: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    NonConvergence(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("delta {delta} exceeds the feasible maximum {delta_max}")]
    DeltaTooLarge { delta: f64, delta_max: f64 },

    #[error("invalid phase: {0}")]
    InvalidPhase(String),

    #[error("no generating phase: B block is singular")]
    NoPhase,

    #[error("map is not canonical (defects {c1:.3e}, {c2:.3e}, {c3:.3e})")]
    NotCanonical { c1: f64, c2: f64, c3: f64 },

    #[error("canonical map yields a phase with Im phi_yy not positive definite (min eigenvalue {0:.3e})")]
    NotFbiPhase(f64),

    #[error("point lies in the singular space")]
    InSingularSpace,
}

impl Error {
    /// Broad classification used by front ends to pick an exit status.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NonConvergence(_) | Error::Linalg(_) => ErrorKind::Numerical,
            Error::DegenerateSpectrum(_) => ErrorKind::DegenerateSpectrum,
            _ => ErrorKind::Input,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
    DegenerateSpectrum,
}
