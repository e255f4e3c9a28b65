use thiserror::Error;

/// Errors raised by the geometric and algebraic routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("algebra parameters differ: {left} vs {right}")]
    DeltaMismatch { left: f64, right: f64 },
    #[error("element is a zero divisor (norm {norm:e})")]
    ZeroDivisor { norm: f64 },
    #[error("algebra with delta = {0} has no nontrivial idempotents")]
    NotSplit(f64),
    #[error("delta and mu must be nonzero with the same sign (got {delta}, {mu})")]
    SignMismatch { delta: f64, mu: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix does not preserve the hermitian form (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("pairing phi(v) = {0} is not 1")]
    PairingNotOne(f64),
    #[error("diagonal entry {index} is zero")]
    ZeroEigenvalue { index: usize },
    #[error("limit point cannot be decoded: {0}")]
    Undecodable(String),
    #[error("inconsistent pairwise limit data: {0}")]
    Inconsistent(String),
    #[error("no limit group is known for signature {0}")]
    UnknownSignature(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("representation is central")]
    CentralRep,
    #[error("not a representation: bracket residual {0:e}")]
    NotARepresentation(f64),
    #[error("representation is not the holonomy of a translation or shear torus")]
    NotHolonomy,
    #[error("element is not in the identity component")]
    NotIdentityComponent,
    #[error("point lies outside the model domain")]
    OutsideDomain,
    #[error("opposite sides have different model lengths ({0:e})")]
    SideLengthMismatch(f64),
    #[error("invalid parallelogram: {0}")]
    InvalidParallelogram(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
