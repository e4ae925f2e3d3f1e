use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("infeasible constraint system: {0}")]
    Infeasible(String),

    #[error("optimizer did not converge within {evals} evaluations (best value {best})")]
    NonConvergence { evals: usize, best: f64 },

    #[error("reduced and full searches disagree by {gap:e} (tolerance {tol:e})")]
    SearchDisagreement { gap: f64, tol: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = BoundsError> = std::result::Result<T, E>;
