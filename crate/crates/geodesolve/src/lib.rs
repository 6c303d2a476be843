//! Distance geometry with and without edge assignments.
//!
//! This crate models both problem forms (realize an edge-weighted graph in
//! `K` dimensions, or realize a bare list of distance values when the graph
//! is unknown) and ships everything needed to solve and benchmark them
//! end to end:
//!
//! - a catalog of nonlinear, mixed-integer, and cone formulations
//!   ([`formulations`]);
//! - an augmented-Lagrangian local solver with a multistart wrapper
//!   ([`smooth_solver`]), a bounded-variable simplex and branch-and-bound
//!   engine ([`lp_solver`]), and a projection-based semidefinite solver
//!   ([`psd_solver`]);
//! - relax/factor/reduce/refine pipelines and an exact brute-force
//!   enumeration oracle for the unassigned form ([`pipelines`]);
//! - instance generators and JSON file formats ([`instances`]);
//! - realization-error and graph-similarity metrics ([`metrics`]).

pub mod formulations;
pub mod instances;
pub mod linalg;
pub mod lp_solver;
pub mod metrics;
pub mod pipelines;
pub mod psd_solver;
pub mod smooth_solver;
pub mod types;

pub use types::{
    derive_udgp, order_induced_assignment, reconstruct_graph, Assignment, DgpInstance, Edge, Graph,
    ModelError, Realization, SolveReport, SolveStatus, UdgpInstance,
};
