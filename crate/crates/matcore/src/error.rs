use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unstable closed loop: max Re(eig) = {0:.6e}")]
    Unstable(f64),
    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    Symmetry(f64),
    #[error("matrix is not positive definite (lambda_min = {0:.6e})")]
    NotPositiveDefinite(f64),
    #[error("rank deficient: rank {rank} < {needed} columns")]
    Rank { rank: usize, needed: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("alpha nonpositive: c = {c} must lie in (0, lambda_min(Q)/2 = {half})")]
    AlphaNonpositive { c: f64, half: f64 },
    #[error("Omega nonpositive: eps - beta*Phi^2 = {0:.6e}")]
    OmegaNonpositive(f64),
    #[error("parameter out of range: {0}")]
    Param(String),
}

pub type Result<T> = std::result::Result<T, MatError>;
