use thiserror::Error;

use crate::metric::{ClientId, PointId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {0} is outside the instance ({1} points)")]
    InvalidPoint(PointId, usize),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("metric axiom violated: {0}")]
    MetricViolation(String),

    #[error("client {0} is already live")]
    DuplicateClient(ClientId),

    #[error("client {0} is not live")]
    UnknownClient(ClientId),

    #[error("no live clients")]
    NoClients,

    #[error("exact optimum refused: {0} facilities (limit {1})")]
    TooManyFacilities(usize, usize),

    #[error("snapshots come from different hierarchies")]
    StructureMismatch,

    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },

    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
