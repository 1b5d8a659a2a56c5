use num_complex::Complex64;

use crate::adjust::AdjustmentPlan;

/// Errors produced by graph construction and the analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("node id {id} out of range 1..={n}")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),

    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: usize, dst: usize },

    #[error("edge {src} -> {dst} has non-positive or non-finite weight {weight}")]
    BadWeight { src: usize, dst: usize, weight: f64 },

    #[error("leader set must not be empty")]
    EmptyLeaderSet,

    #[error("duplicate leader {0}")]
    DuplicateLeader(usize),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigensolver failed to converge")]
    EigensolverFailure,

    #[error("spectrum does not match the matrix: {0}")]
    SpectrumMismatch(String),

    #[error("{lambda} is not an eigenvalue (nearest eigenvalue at distance {distance:.3e})")]
    NotAnEigenvalue { lambda: Complex64, distance: f64 },

    #[error("candidate enumeration exceeded the budget of {budget} sets")]
    BudgetExceeded { budget: usize },

    #[error("nodes {unreachable:?} are unreachable from node {root}")]
    UnreachableNodes { root: usize, unreachable: Vec<usize> },

    #[error("graph is not a rooted directed tree: {0}")]
    NotATree(&'static str),

    #[error(
        "edges into node {ancestor} and its descendant {descendant} carry the same weight \
         {weight}; the tree eigenbasis recursion requires distinct weights along root paths"
    )]
    RepeatedTreeWeights { ancestor: usize, descendant: usize, weight: f64 },

    #[error("graph has no spanning tree (leader-reachability cannot cover all nodes from one root)")]
    NoSpanningTree,

    #[error("node {0} is not the root of any spanning tree of the graph")]
    NotASpanningRoot(usize),

    #[error("row {0} of the Laplacian has no off-diagonal entry in an earlier column")]
    NoAdjustableEdge(usize),

    #[error("adjustment plan references edge {src} -> {dst} which is not in the graph")]
    PlanEdgeMissing { src: usize, dst: usize },

    #[error("weight adjustment did not reach full rank within {limit} iterations")]
    IterationLimitExceeded {
        limit: usize,
        partial: Box<AdjustmentPlan>,
    },

    #[error("graph is not in-degree regular: node {a} has in-degree {da}, node {b} has in-degree {db}")]
    NotInDegreeRegular { a: usize, da: usize, b: usize, db: usize },

    #[error("analysis requires unit edge weights, but edge {src} -> {dst} has weight {weight}")]
    NotUnitWeights { src: usize, dst: usize, weight: f64 },

    #[error("walk count overflow while raising the adjacency matrix to power {0}")]
    WalkCountOverflow(u32),
}

pub type Result<T> = core::result::Result<T, Error>;
