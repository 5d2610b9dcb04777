use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sign oracle stalled on symbol `{0}`")]
    OracleStall(String),
    #[error("negative input to is_infinitesimal")]
    NegativeInput,
    #[error("scalars live over different symbol bases")]
    BasisMismatch,
    #[error("product of two non-rational scalars")]
    SymbolProduct,
    #[error("zero vector has no primitive form")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("inequality is not valid on the polyhedron; witness {witness}")]
    NotValid { witness: String },
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("no point found: polyhedron is empty")]
    Empty,
    #[error("point is not on the strictly positive side of the functional")]
    NotInteriorSide,
    #[error("cones do not meet in a common face")]
    NotCommonFace,
    #[error("cones {0} and {1} do not meet in a common face")]
    NotPairwiseFaces(usize, usize),
    #[error("pullback along the zero vector")]
    ZeroGammaBar,
    #[error("point is not on the boundary of the polyhedron")]
    NotOnBoundary,
    #[error("point lies on more than one edge")]
    NonUnique,
    #[error("cone is not in the half-space ambient")]
    WrongAmbient,
    #[error("value group is trivial")]
    TrivialGamma,
    #[error("scalar {0} is not in the rational span of the value group")]
    NotInQGamma(String),
    #[error("gamma bar is not contained in the cone B")]
    GammaBarNotInB,
    #[error("inclusion fails; witness {witness}")]
    NotIncluded { witness: String },
    #[error("presentation only meets height zero")]
    HeightZeroOnly,
    #[error("separation margin is not positive")]
    NonPositiveMargin,
    #[error("pullback of the lifted fan differs from the input: {0}")]
    ReductionVerificationFailed(String),
    #[error("completion engine exhausted after {steps} steps: {reason}")]
    CompletionEngineExhausted { steps: usize, reason: String, trace: Vec<String> },
    #[error("fan is not pure full-dimensional")]
    NotPure,
    #[error("no valid ray for facet")]
    NoValidRay,
    #[error("star join rejected: {0}")]
    NotStarShaped(String),
    #[error("dimension {0} is too large for this operation")]
    DimensionTooLarge(usize),
    #[error("fan is not of finite type; witness vertex {0}")]
    NotFiniteType(String),
    #[error("gamma is divisible by r in the value group")]
    GammaDivisible,
    #[error("no rational bracket found for a ratio after {0} attempts")]
    BracketSearchExhausted(usize),
    #[error("parse error at line {line}, column {column}: {msg}")]
    ParseError { line: usize, column: usize, msg: String },
    #[error("semantic error: {0}")]
    SemanticError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
