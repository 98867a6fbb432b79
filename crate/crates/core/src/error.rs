use thiserror::Error;

use crate::linalg::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-positive weight {weight} for node {node} in hyperedge {hyperedge}")]
    NonPositiveWeight { node: usize, hyperedge: usize, weight: f64 },

    #[error("node {node} appears more than once in hyperedge {hyperedge}")]
    DuplicateMembership { node: usize, hyperedge: usize },

    #[error("node {node} out of range for hypergraph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("node {0} has no neighbors (zero out-strength)")]
    IsolatedNode(usize),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("solver did not converge after {} iterations (relative residual {:e})", .0.iterations, .0.relative_residual)]
    NotConverged(SolveReport),

    #[error("target {target} is unreachable from node {node}")]
    Disconnected { target: usize, node: usize },

    #[error("target {0} leaves no non-adherent source nodes")]
    TargetIsWholeGraph(usize),

    #[error("dense oracle limited to {limit} unknowns, system has {size}")]
    DenseLimitExceeded { limit: usize, size: usize },

    #[error("generating function normalization off by {defect:e}")]
    NormalizationFailed { defect: f64 },

    #[error("no run out of {runs} reached the target within {max_steps} steps")]
    AllCensored { runs: u64, max_steps: u64 },

    #[error("rankings cover different node sets")]
    MismatchedNodeSets,

    #[error("ranking has constant distances; rank correlation undefined")]
    ConstantRanking,

    #[error("node {0} has no label")]
    MissingLabel(usize),

    #[error("node {0} has no tag set")]
    MissingTags(usize),
}
