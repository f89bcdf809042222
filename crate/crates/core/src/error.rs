use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Input is geometrically or algebraically degenerate.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// A positive dependence exists only with a non-positive coefficient.
    #[error("origin is not in the relative interior of the vertex hull")]
    OriginNotInterior,
    /// The sector surrogate could not produce a valid vertex tuple.
    #[error("surrogate vertex construction unavailable: {0}")]
    SurrogateUnavailable(String),
    /// The measure already has sufficient depth and no override was given.
    #[error("measure has sufficient depth; vertex tuple is only defined for insufficient depth")]
    NotInsufficient,
    /// A computed object violated an invariant that should hold by construction.
    #[error("internal consistency error: {0}")]
    Internal(String),
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
