use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("size cap exceeded: {what} = {size} > {cap}")]
    SizeCapExceeded { what: &'static str, size: u64, cap: u64 },
    #[error("no primitive element found in GF({0})")]
    NoPrimitiveFound(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("points coincide")]
    CoincidentPoints,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not on the line")]
    NotIncident,
    #[error("matrix is singular")]
    Singular,
    #[error("orbit exceeds cap of {0} elements")]
    OrbitCapExceeded(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("generators do not close to a subgroup: {0}")]
    NotASubgroup(String),
    #[error("map has a nonzero translation part")]
    InvalidShape,
    #[error("seed pair is not compatible with the flag set: {0}")]
    IncompatibleSeed(String),
    #[error("orbital is not self-paired")]
    NotSelfPaired,
    #[error("no self-paired orbital for c = w^{r}: {reason}")]
    NotSelfPairedForC { r: u32, reason: String },
    #[error("component is not complete multipartite (witness {0:?})")]
    NotCompleteMultipartite([usize; 3]),
    #[error("generator {generator} is not an automorphism: edge {edge:?} maps to a non-edge")]
    NotAnAutomorphismGroup { generator: usize, edge: (String, String) },
    #[error("not an almost multicover: blocks {block} and {other} share {shared} of {size}")]
    NotAlmostMulticover { block: String, other: String, shared: usize, size: usize },
    #[error("not a 2-design: pair coverage ranges over {min}..={max}")]
    NotA2Design { min: usize, max: usize },
    #[error("internal mismatch: {0}")]
    InternalMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
