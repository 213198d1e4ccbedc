use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("residual is not neutral: charge defect {defect:e} exceeds tolerance {tol:e}")]
    NotNeutral { defect: f64, tol: f64 },

    #[error("invalid charge profile: {0}")]
    InvalidProfile(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("Fermi level bracket could not be expanded after {0} doublings")]
    BracketFailure(usize),

    #[error("spectrum below {cutoff} is insufficient to reach charge {charge}")]
    InsufficientSpectrum { cutoff: f64, charge: f64 },

    #[error("tail fit failed: {0}")]
    TailFit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
