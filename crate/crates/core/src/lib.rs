//! Exact and Monte-Carlo machinery for comparing the random intersection
//! graph `G(n,m;p)` with the binomial random graph `G(n,p̂)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] – labeled graphs on at most 32 vertices as edge bitmasks,
//!   clique and subgraph counts, hyperedge sets and clique unions.
//! * [`models`] – parameter formulas and seeded samplers for every model
//!   (binomial graph, intersection graph, clique-cover graph, Poissonized
//!   clique stream).
//! * [`exact`] – dense distributions over all labeled graphs on `n <= 7`
//!   vertices, exact total variation and binomial TV bounds.
//! * [`couplings`] – maximal couplings and the coupled intersection /
//!   clique-cover pair.
//! * [`diagnostics`] – regime classification, graph-class membership,
//!   moment checks and Monte-Carlo TV lower bounds.
//! * [`experiments`] – grid-driven batch commands backing the `rigtv` CLI.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled (the default) and plain iteration
//! otherwise. Results are bit-identical either way.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod couplings;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod exec;
pub mod experiments;
pub mod graph;
pub mod models;
pub mod numeric;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{Graph, HyperedgeSet};
pub use models::ModelParams;
