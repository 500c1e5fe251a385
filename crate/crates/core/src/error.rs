use thiserror::Error;

use crate::syndrome::SyndromeSolution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular over GF(2)")]
    SingularMatrix,
    #[error("matrix is not unit {0} triangular")]
    NotTriangular(&'static str),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("target is not in the span of the available parities")]
    Infeasible,
    #[error("node budget exhausted")]
    BudgetExhausted { best: Option<SyndromeSolution> },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
