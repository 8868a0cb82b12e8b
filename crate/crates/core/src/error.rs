use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site count {0} outside supported range 1..={max}", max = crate::fock::MAX_SITES)]
    SiteCount(usize),

    #[error("site index {site} outside 1..={n_sites}")]
    SiteIndex { site: usize, n_sites: usize },

    #[error("occupation word {bits:#b} has bits above site {n_sites}")]
    ConfigurationBits { bits: u32, n_sites: usize },

    #[error("site count mismatch: expected {expected}, got {got}")]
    SiteMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigendecomposition did not converge")]
    Eigendecomposition,

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("{0} requires at least 3 sites (the two-site ring doubles its only bond)")]
    RingTooSmall(&'static str),

    #[error("perturbation exponent {0} must exceed 1 so that K*|Y_K| -> 0")]
    PerturbationExponent(f64),

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter { name, reason: reason.into() }
}
