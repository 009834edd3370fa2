use thiserror::Error;

/// Errors raised by the graded algebra kit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("operands belong to different parameter systems")]
    SystemMismatch,
    #[error("morphism domains do not chain: {0} vs {1}")]
    DomainMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("section is not invertible: base projection is zero")]
    NotInvertible,
    #[error("pole: denominator vanishes at the evaluation point")]
    Pole,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("missing binding for variable `{0}`")]
    MissingBinding(String),
    #[error("degree violation: image of `{symbol}` is not homogeneous of degree {expected}")]
    DegreeViolation { symbol: String, expected: String },
    #[error("character assigns nonzero scalar to nonzero-degree generator `{0}`")]
    CharacterInconsistent(String),
    #[error("denominator is not admissible: {0}")]
    InadmissibleDenominator(String),
    #[error("coefficient does not split over the two factors: {0}")]
    NotSplit(String),
    #[error("exponent of parameter `{0}` exceeds nilpotency or truncation bound")]
    ExponentBound(String),
    #[error("cocycle violation on triple ({0}, {1}, {2})")]
    CocycleViolation(usize, usize, usize),
    #[error("map is not continuous: preimage of open {0} is not open")]
    NotContinuous(usize),
    #[error("invalid finite space: {0}")]
    InvalidSpace(String),
    #[error("invalid presheaf data: {0}")]
    InvalidPresheaf(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid declaration: {0}")]
    Declaration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
