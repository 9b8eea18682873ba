use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("spectral sum truncated too early: tail estimate {tail:e} exceeds {tolerance:e} of Z")]
    Truncation { tail: f64, tolerance: f64 },

    #[error("root not bracketed on [{lo}, {hi}]: {context}")]
    Bracket { lo: f64, hi: f64, context: String },

    #[error("no closed form for stage {0}")]
    NoClosedForm(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
