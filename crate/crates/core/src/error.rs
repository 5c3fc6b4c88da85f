use thiserror::Error;

use crate::geometry::Point;

/// Errors shared by every solver and verifier in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("segment endpoints {a} and {b} coincide")]
    ZeroLengthSegment { a: Point, b: Point },

    #[error("segment {a} -- {b} is not axis-parallel")]
    NotAxisParallel { a: Point, b: Point },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The branch-and-bound oracle ran out of its node budget before it
    /// could prove optimality.
    #[error("oracle inconclusive after {nodes} search nodes (best feasible weight {best:?})")]
    Inconclusive { nodes: u64, best: Option<i64> },

    #[error("precondition violated: pair {p} -- {q} is not M-connected")]
    Unconnected { p: Point, q: Point },

    #[error("target {0} is unreachable from the root")]
    Unreachable(usize),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
