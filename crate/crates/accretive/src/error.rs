use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("resolvent step {lambda} exceeds the range-condition bound {lambda0}")]
    StepExceedsRange { lambda: f64, lambda0: f64 },

    #[error("scalar solver failed to reach tolerance {tol} within {budget} iterations (coordinate {coord}, residual {residual})")]
    SolverFailure {
        coord: usize,
        residual: f64,
        tol: f64,
        budget: usize,
    },

    #[error(
        "iteration count {required:.3e} exceeds the budget {budget} (requested accuracy too tight)"
    )]
    BudgetExceeded { required: f64, budget: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("certificate/instance mismatch: {0}")]
    SnapshotMismatch(String),
}
