//! Engine error type.

use crate::superalgebra::{Bidegree, Dims, GeneratorId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("dimension mismatch: ({0}) vs ({1})")]
    DimensionMismatch(Dims, Dims),

    #[error("generator {generator} out of range for {dims}")]
    GeneratorOutOfRange { generator: GeneratorId, dims: Dims },

    #[error("expected total degree {expected}, found a term of degree {found}")]
    TotalDegree { expected: u32, found: u32 },

    #[error("expected bidegree {expected}, found {found}")]
    BidegreeMismatch { expected: Bidegree, found: Bidegree },

    #[error("{what} must be bidegree-homogeneous")]
    NotHomogeneous { what: &'static str },

    #[error("adjoint series did not terminate within {max_order} steps; the adjoint is not nilpotent on this argument")]
    NonNilpotentAdjoint { max_order: u32 },

    #[error("p-type moment coordinates are not sections of the exterior algebra of A + A*")]
    MomentTermInSection,

    #[error("J^2 is not a constant multiple of the identity")]
    SquareNotScalar,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("evaluator is not representable: {0}")]
    NotRepresentable(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}
