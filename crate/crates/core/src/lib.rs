//! Negative-weight single-source shortest paths.
//!
//! The solver preprocesses the graph into a normal form, then repeatedly
//! neutralizes negative edges with valid potentials found through proper
//! hop distances and negative sandwiches, and finishes with one Dijkstra
//! pass. Negative cycles are reported as checkable certificates.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod sandwich;
pub mod fixtures;
pub mod graph;
pub mod hopdist;
pub mod potentials;
pub mod preprocess;
pub mod solver;

pub use graph::{Edge, EdgeId, Graph, GraphError, Length, NegCycleCert, VertexId, Walk, INF};
pub use potentials::Potential;
pub use solver::{solve_sssp, SolveConfig, SolveOutcome, SolveResult};
