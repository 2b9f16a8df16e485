use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph needs at least {min} vertices, got {got}")]
    TooFewVertices { min: usize, got: usize },
    #[error("vertex {vertex} out of range (vertex count {count})")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("edge {u}-{v} has length {length}, below the minimum of 1")]
    LengthBelowOne { u: usize, v: usize, length: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {0} is not reachable from the root")]
    DisconnectedGraph(VertexId),
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("edge set is not a subtree containing the root")]
    NotARootedSubtree,
    #[error("edge {0} is not an edge of the graph")]
    UnknownEdge(usize),
    #[error("prefix ending at position {position} is not a rooted subtree")]
    PrefixNotTree { position: usize },
    #[error("search leaves {missing} vertices unreached")]
    IncompleteCover { missing: usize },
    #[error("search does not belong to this graph: {0}")]
    ForeignSearch(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("vertex set must be non-empty")]
    EmptySet,
    #[error("operation requires {0}")]
    UnsupportedGraphClass(&'static str),
    #[error("graph is not a tree")]
    NotATree,
    #[error("instance too large: {what} is {count}, cap is {cap}")]
    CapExceeded { what: &'static str, count: u128, cap: u128 },
    #[error("exact Steiner tree supports at most {max} terminals, got {got}")]
    TooManyTerminalsForExact { max: usize, got: usize },
    #[error("d/mu = {ratio} lies outside the mixed regime [1/k, 2/k] for k = {k}")]
    OutOfRegime { k: usize, ratio: String },
    #[error("game solver failed: {0}")]
    NumericalFailure(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("reduction needs at least as many clauses as variables (n = {vars}, m = {clauses})")]
    PreconditionMViolated { vars: usize, clauses: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Coarse error classes, used by the command line to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Resource,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::CapExceeded { .. } | Error::TooManyTerminalsForExact { .. } => ErrorClass::Resource,
            Error::NumericalFailure(_) => ErrorClass::Numerical,
            _ => ErrorClass::Input,
        }
    }
}
