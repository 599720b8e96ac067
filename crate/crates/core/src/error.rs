use thiserror::Error;

/// Errors reported by the exact-arithmetic operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("root order mismatch: {0} does not divide {1}")]
    OrderMismatch(u64, u64),

    #[error("operation requires p = {expected}, got p = {got}")]
    WrongCharacteristic { expected: u64, got: u64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("table is not a polynomial of degree <= {budget} (found degree {found})")]
    NotPolynomialWithinBudget { budget: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("interval comparison indeterminate at maximum precision: {0}")]
    Indeterminate(String),

    #[error("self-check failed (bug certificate): {0}")]
    SelfCheck(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
