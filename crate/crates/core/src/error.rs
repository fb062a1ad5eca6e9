//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoeffError {
    #[error("unknown coefficient mode `{0}` (expected `rational` or `float[:bits]`)")]
    BadMode(String),
    #[error("cannot parse coefficient `{0}`")]
    BadCoefficient(String),
    #[error("coefficient `{literal}` is not valid in {mode} mode")]
    WrongMode { literal: String, mode: String },
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("variable lists differ: [{0}] vs [{1}]")]
    VarMismatch(String, String),
    #[error("truncation orders differ: {0} vs {1}")]
    TruncationMismatch(u32, u32),
    #[error("substitution argument {index} has a nonzero constant term")]
    ConstantTermInArg { index: usize },
    #[error("expected {expected} substitution arguments, got {got}")]
    ArgCountMismatch { expected: usize, got: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: u32, max: u32 },
    #[error("term of total degree {degree} exceeds truncation order {truncation}")]
    TermBeyondTruncation { degree: u32, truncation: u32 },
    #[error("coordinate change must be identity plus terms of degree >= 2 (component {component})")]
    NonIdentityLinearPart { component: usize },
    #[error("series parse error at byte {at}: {reason}")]
    Parse { at: usize, reason: String },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("component count {got} does not match dimension {dim}")]
    BadComponentCount { dim: usize, got: usize },
    #[error("requested degree {degree} exceeds reliable degree {reliable}")]
    BeyondReliableDegree { degree: u32, reliable: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LsaError {
    #[error("operator does not vanish at the base point after removing the scalar part")]
    NonScalarBasePoint,
    #[error("structure constants are not in a single coefficient mode")]
    MixedMode,
    #[error("algebra is not left-symmetric; witness triple ({0}, {1}, {2})")]
    NotLeftSymmetric(usize, usize, usize),
    #[error("identification requires dimension 2, got {0}")]
    NotTwoDimensional(usize),
    #[error("identification is ambiguous at the configured tolerance")]
    UnclassifiedAtTolerance,
    #[error("algebra lies in the real class {label} but admits no exact rational normalization")]
    IrrationalWitness { label: String },
    #[error("{context}: missing alpha arithmetic certificate")]
    MissingAlphaClass { context: String },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BrjunoError {
    #[error("negative depth data: {0}")]
    BadDepth(String),
    #[error("partial quotient at index {index} must be >= 1, got {got}")]
    BadPartialQuotient { index: usize, got: String },
    #[error("growth rule violates its floor at index {index}: quotient {got}")]
    RuleBelowFloor { index: usize, got: String },
    #[error("requested depth {requested} exceeds available depth {available}")]
    DepthExceeded { requested: usize, available: usize },
    #[error("float input exhausted its precision at depth {reached} (requested {requested})")]
    PrecisionExhausted { reached: usize, requested: usize },
    #[error("cannot parse continued-fraction spec `{0}`")]
    BadCfSpec(String),
    #[error("value is not exactly representable for this operation: {0}")]
    NotExact(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalFormError {
    #[error("operator is not scalar at the origin")]
    NonScalarOrigin,
    #[error("linear part is not the expected one-parameter triangular template")]
    WrongLinearPart,
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("input is not Nijenhuis through degree {degree}: residual monomial {monomial}")]
    NotNijenhuis { degree: u32, monomial: String },
    #[error("degree-by-degree solve hit a singular step at degree {degree} (wrong linear part?)")]
    SingularStep { degree: u32 },
    #[error("triangular input expected: {0}")]
    NotTriangular(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonodromyError {
    #[error("loop radius {radius} exceeds the configured domain radius {domain}")]
    RadiusOutsideDomain { radius: f64, domain: f64 },
    #[error("step size underflow at path position {position}")]
    StepUnderflow { position: f64 },
    #[error("trajectory escaped the configured domain at path position {position}")]
    DomainEscape { position: f64 },
    #[error("sample set is degenerate: {0}")]
    DegenerateSamples(String),
    #[error("need at least {needed} samples with distinct nonzero transversal values, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}
