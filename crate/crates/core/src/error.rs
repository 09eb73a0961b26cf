use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrimeP(u64),
    #[error("modulus {0:?} is not a monic irreducible polynomial over F_p")]
    ReducibleModulus(Vec<u64>),
    #[error("invalid ring descriptor: {0}")]
    InvalidSpec(String),
    #[error("elements belong to different rings")]
    SpecMismatch,
    #[error("element {0} is not a unit")]
    NotAUnit(String),
    #[error("coefficient map does not apply to this ring: {0}")]
    MapSpecMismatch(String),
    #[error("ring has {size} elements, above the enumeration bound {bound}")]
    RingTooLarge { size: u64, bound: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("twisted elements live in different contexts")]
    ContextMismatch,
    #[error("wrap unit does not square to one")]
    LambdaNotInvolutive,
    #[error("cocycle identity fails at (g^{0}, g^{1}, g^{2})", .triple.0, .triple.1, .triple.2)]
    InvalidCocycle { triple: (usize, usize, usize) },
    #[error("cocycle is not normalized at (g^{0}, g^{1})", .pair.0, .pair.1)]
    UnnormalizedCocycle { pair: (usize, usize) },
    #[error("no splitting field of degree <= {0} over the residue field")]
    DegreeBoundExceeded(usize),
    #[error("characteristic {p} divides n = {n}")]
    PDividesN { p: u64, n: usize },
    #[error("input is not idempotent in the residue ring")]
    NotIdempotentInput,
    #[error("x^n - lambda has {factors} irreducible factors, above the bound of {bound}")]
    TooManyFactors { factors: usize, bound: usize },
    #[error("generator is not idempotent")]
    NotIdempotent,
    #[error("coefficient map is not additive; dual code is not constructed")]
    NonAdditiveMap,
    #[error("no codeword of weight <= {ceiling}; distance lies in [{floor}, {upper}]")]
    SearchCeilingExceeded {
        ceiling: usize,
        floor: usize,
        upper: usize,
    },
    #[error("criterion does not apply: {0}")]
    CriterionInapplicable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
