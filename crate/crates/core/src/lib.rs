//! Solver library for the decision problem "does a connected oriented graph
//! contain an acyclic subgraph with at least `m/2 + (n−1)/4 + k/4` arcs?"
//! (acyclic subgraph above the Poljak–Turzík bound).
//!
//! The pipeline: reduction rules shrink the instance while accounting for `k`
//! exactly; if `k` is exhausted the answer is yes and a witness ordering is
//! reconstructed by replaying the trace. Otherwise the removed one-way set
//! `U` leaves a forest of cliques behind, and a dynamic program over the
//! orderings of `U` decides the instance exactly. A kernelization pass
//! produces an equivalent instance with `O(k²)` vertices and arcs. Everything
//! is validated against a brute-force oracle at desk scale.

pub mod bounds;
pub mod dp;
pub mod gen;
pub mod graph;
pub mod kernel;
pub mod oracle;
pub mod reduce;
pub mod tournament;

pub use bounds::{
    count_forward, decide_threshold, gamma, threshold_q, verify_yes, BoundsError, Instance, ScoreQ,
    WitnessOrdering,
};
pub use graph::{BlockDecomposition, GraphError, OrientedGraph, VertexSet};
pub use oracle::{oracle_max_acyclic, oracle_max_acyclic_capped, OracleError, OracleResult};
