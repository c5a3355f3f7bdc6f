use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid time grid: {0}")]
    InvalidTimes(String),

    #[error("invalid qubit state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A degenerate eigenvalue cluster could not be split into mirror
    /// eigenspaces.
    #[error("degenerate cluster of size {size} near λ = {eigenvalue} could not be split into ±1 mirror eigenspaces")]
    DegenerateUnresolved { eigenvalue: String, size: usize },

    /// The eigenvector matrix is (numerically) singular. Near θ = kπ the
    /// ODE evolution path still applies.
    #[error("coupling matrix is not diagonalizable to working precision (eigenvector condition {condition:.3e}, residual {residual:.3e})")]
    NotDiagonalizable { condition: f64, residual: f64 },

    #[error("eigen solver failed to converge")]
    EigenSolverFailed,

    #[error(
        "eigenvector condition {condition:.3e} too large for a modal expansion; use the ODE path"
    )]
    IllConditioned { condition: f64 },

    #[error("modal expansion residual {residual:.3e} exceeds tolerance")]
    ExpansionInaccurate { residual: f64 },

    #[error("θ is {delta:.4} away from the nearest multiple of π; perturbative formulas need |δ| < {limit}")]
    OutOfPerturbativeRange { delta: f64, limit: f64 },

    #[error("no symmetry-protected subspace: {0}")]
    NoProtectedSubspace(String),

    #[error("no such state: {0}")]
    NoSuchState(String),
}
