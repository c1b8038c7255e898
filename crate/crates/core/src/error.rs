use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TetraError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not a contraction: operator norm {norm} exceeds 1")]
    NotAContraction { norm: f64 },

    #[error("invalid triple: commutator norm {residual:e} exceeds tolerance")]
    InvalidTriple { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("fundamental operator equations are not solvable (residual {residual:e})")]
    NotTetrablockCompatible { residual: f64 },

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// Two independent computations that must agree did not.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, TetraError>;
