use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("vertex set is empty")]
    EmptySet,

    #[error("vertex {0} is out of range")]
    VertexOutOfRange(VertexId),

    #[error("external vertex id {0} is not in the graph")]
    UnknownVertex(u64),

    /// The cut denominator vanishes (the set or its complement carries no volume).
    #[error("degenerate cut: volume {volume} of total {total}")]
    DegenerateCut { volume: u64, total: u64 },

    #[error("batch vertex {0} is already a community member")]
    BatchOverlap(VertexId),

    #[error("batch vertex {0} is not a community member")]
    BatchNotMember(VertexId),

    #[error("batch contains the anchor vertex {0}")]
    AnchorInBatch(VertexId),

    #[error("query vertex {0} has no neighbours")]
    IsolatedQuery(VertexId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("brute force refuses graphs with {n} vertices (limit {limit})")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("requested {requested} queries but only {available} communities exist")]
    NotEnoughCommunities { requested: usize, available: usize },

    #[error("query vertex {0} is not in any ground-truth community")]
    NotInGroundTruth(u64),

    /// A search returned a set that misses the query or is disconnected.
    #[error("output contract violated: {0}")]
    Contract(String),

    #[error("query {vertex}: {source}")]
    Query {
        vertex: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
