use alloc::string::String;

use crate::graph::NodeId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("no profile for node {0}")]
    MissingProfile(NodeId),
    #[error("unknown message `{0}`")]
    UnknownMessage(String),
    #[error("invalid cascade `{id}`: {msg}")]
    InvalidCascade { id: String, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("dimension mismatch: model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training set contains a single class")]
    SingleClass,
    #[error("no {0} instances")]
    NoInstances(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
