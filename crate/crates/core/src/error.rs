use thiserror::Error;

/// Errors raised by structure construction and the algorithms built on it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("vertex {vertex} out of range for a domain of size {size}")]
    OutOfRange { vertex: usize, size: usize },

    #[error("hyperedge tuple {0:?} has repeated entries")]
    RepeatedEntries(Vec<usize>),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("domain of size {0} exceeds the supported maximum of {max}", max = crate::MAX_DOMAIN)]
    TooLarge(usize),

    #[error("expected a single hyperedge relation of arity >= {min_arity}: {reason}")]
    NotAHypergraph { min_arity: usize, reason: String },

    #[error("parity condition fails on the vertex set {0:?}")]
    ParityViolation(Vec<usize>),

    #[error("budget exceeded: {what} needs about {estimate} steps, budget is {budget}")]
    Budget {
        what: String,
        estimate: u128,
        budget: u128,
    },

    #[error("invalid embedding: {0}")]
    Embedding(String),

    #[error("malformed tree: {0}")]
    Tree(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
