use thiserror::Error;

/// Errors raised by field construction, verification and the lift builders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is reducible")]
    NotIrreducible(String),
    #[error("malformed modulus: {0}")]
    BadModulus(String),
    #[error("field order {order} exceeds the supported maximum {max}")]
    FieldTooLarge { order: u64, max: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("code {code} out of range for a field of order {order}")]
    OutOfRange { code: u64, order: u64 },
    #[error("field order {order} exceeds the exhaustive cap {cap}")]
    OrderCapExceeded { order: u64, cap: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("map sends kernel element {x} to {image}, outside ker(tr)")]
    MapEscapesKernel { x: u32, image: u32 },
    #[error("kernel hypothesis fails at b = {b} for the {which} shift")]
    HypothesisFails { b: u32, which: &'static str },
    #[error("value table has length {got}, expected {expected}")]
    BadTableLength { expected: usize, got: usize },
    #[error("field order {q} exceeds the search cap {cap}")]
    SearchCapExceeded { q: u64, cap: u64 },
    #[error("h-form reconstruction disagrees with the input map at {at}")]
    ReconstructionMismatch { at: u32 },
    #[error("parse error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::PreconditionViolated(msg.into())
}
