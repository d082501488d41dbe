use thiserror::Error;

use crate::multigraph::VertexId;

/// Crate-wide error type for precondition violations and exceeded caps.
///
/// Negative verdicts (a witness does not exist, a certificate is violated)
/// are *not* errors; they are encoded in the result types of the individual
/// deciders. Errors mean the question itself was malformed or too large.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {0} has degree {1}, expected 2")]
    DegreeNotTwo(VertexId, usize),
    #[error("parts do not form a partition: {0}")]
    NotAPartition(String),
    #[error("graph has {0} vertices, operation needs at least {1}")]
    TooFewVertices(usize, usize),
    #[error("size cap exceeded: {what} has size {size}, cap is {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("wall size {0} is too small for this operation (needs {1})")]
    WallTooSmall(u32, u32),
    #[error("construction defect: {0}")]
    ConstructionDefect(String),
    #[error("parameter overflow while evaluating {0}")]
    ParameterOverflow(String),
    #[error("external constant {0} is not configured")]
    MissingExternal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
