use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("subspace is not linear (distance of origin to the set: {residual:e})")]
    NotLinear { residual: f64 },

    #[error("linear part is not orthogonal (max |QᵀQ - I| = {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("operator is not a reflector of a linear subspace (deviation {deviation:e})")]
    NotReflector { deviation: f64 },

    #[error("point is not a fixed point (residual {residual:e})")]
    NotFixedPoint { residual: f64 },

    #[error("operators have no common fixed point (residual {residual:e})")]
    NoCommonFixedPoint { residual: f64 },

    #[error("subspaces have empty intersection (residual {residual:e})")]
    EmptyIntersection { residual: f64 },

    #[error("operator is expansive (norm {norm})")]
    Expansive { norm: f64 },

    #[error("operator is not self-adjoint (max |A - Aᵀ| = {asymmetry:e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("operator is not monotone (smallest eigenvalue of symmetric part {min_eigenvalue:e})")]
    NotMonotone { min_eigenvalue: f64 },

    #[error("operator is not linear (offset norm {offset:e})")]
    NotLinearMap { offset: f64 },

    #[error("subspace is not fixed by the operator (residual {residual:e})")]
    NotFixedSubspace { residual: f64 },

    #[error("too many reflectors: {count} exceeds the limit of {limit}")]
    TooManyReflectors { count: usize, limit: usize },

    #[error("invalid averaging parameters: {0}")]
    InvalidAveraging(String),

    #[error("block {index} does not contain the identity")]
    BlockMissingIdentity { index: usize },

    #[error(
        "circumcenter of an isometry-induced point set failed numerically \
         (spread {spread:e}, hull residual {residual:e})"
    )]
    NumericalProperness { spread: f64, residual: f64 },

    #[error("rate chain violated: {0}")]
    ChainViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("instance generation failed: {0}")]
    Degenerate(String),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
