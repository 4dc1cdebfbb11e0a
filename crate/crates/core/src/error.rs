use std::io;

use crate::NodeId;

/// Errors raised by graph construction, pattern evaluation and the covering machinery.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid node id {0}")]
    InvalidNode(NodeId),
    #[error("node count must be at least 1")]
    EmptyGraph,
    #[error("size mismatch: {left} nodes vs {right} nodes")]
    SizeMismatch { left: usize, right: usize },
    #[error("round {0} is beyond the pattern horizon")]
    HorizonExceeded(usize),
    #[error("invalid time interval [{t1}, {t2}]")]
    InvalidInterval { t1: usize, t2: usize },
    #[error("depth {available} is smaller than the required {required}")]
    InsufficientDepth { required: usize, available: usize },
    #[error("communication graph of round {0} is not nonsplit")]
    NotNonsplit(usize),
    #[error("cannot split {n} into {m} positive parts")]
    InvalidPartition { n: usize, m: usize },
    #[error("set of size {size} is smaller than subset size {subset_size}")]
    TooSmall { size: usize, subset_size: usize },
    #[error("subset assignment has no value for {0:?}")]
    MissingAssignment(Vec<NodeId>),
    #[error("{subsets} subsets exceed the enumeration budget of {budget}")]
    BudgetExceeded { subsets: u128, budget: u128 },
    #[error("empty node set")]
    EmptySet,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("node {0} is a broadcaster in the prefix product")]
    BroadcasterExists(NodeId),
    #[error("graph at index {0} is not rooted")]
    NotRooted(usize),
    #[error("need at least {required} graphs, got {got}")]
    TooFewGraphs { required: usize, got: usize },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
