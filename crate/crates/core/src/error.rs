use thiserror::Error;

/// Errors produced by the model, its samplers and its numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (e.g. a negative time).
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument is well-typed but inconsistent with the operation's contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A hazard specification or configuration violates one of its invariants.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
