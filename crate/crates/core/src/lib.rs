//! Expanding search on rooted, edge-weighted graphs.
//!
//! An expanding search visits the vertices of a graph one edge at a time,
//! each new edge adjacent to the region already searched. This crate
//! computes and bounds the deterministic search ratio `σ` (best worst-case
//! normalized search time) and the randomized search ratio `ρ` (value of
//! the Searcher/Hider game), and checks every constructive strategy
//! against an exact game oracle on small instances.
//!
//! Module map:
//!
//! - [`graph`]: the rooted graph model, distances, balls, contraction, star closure.
//! - [`search`]: pure and mixed expanding searches, payoffs, Hider lower bounds.
//! - [`det`]: deterministic strategies (distance order, doubling with Steiner trees, brute force).
//! - [`randomized`]: RDFS, randomized deepening, star strategies, lifting.
//! - [`oracle`]: search enumeration and the zero-sum game solver.
//! - [`bench`]: instance generators, file formats, the SAT reduction and CSV reports.

pub mod bench;
pub mod det;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod randomized;
pub mod rational;
pub mod search;

pub use error::{Error, ErrorClass, Result};
pub use graph::{DistanceMap, Edge, EdgeId, MappedGraph, RootedGraph, VertexId};
pub use rational::Rational;
pub use search::{ExpandingSearch, HiderDistribution, MixedSearch, PayoffTable};
