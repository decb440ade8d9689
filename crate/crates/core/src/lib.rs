//! Analysis and simulation of multi-drawing urn replacement tensors.
//!
//! An urn over `d` colours evolves by drawing an ordered `m`-tuple of balls
//! with replacement and adding `R(i, j_1, ..., j_m)` balls of colour `i` for
//! draw `(j_1, ..., j_m)`. This crate provides:
//!
//! * [`tensor`] — the replacement tensor, its tenability/balance/ergodicity
//!   checks, and the induced transition tensor on the tuple state space;
//! * [`stochastic`] — stochastic tensors and their per-slot ergodicity
//!   coefficients (the contraction certificate);
//! * [`fixed_point`] — the Z-eigenvector equation `sigma x = R(x, ..., x)`
//!   on the simplex: certified Picard iteration, an analytic two-colour root
//!   scan, and multi-start exploration;
//! * [`urn`] — direct simulation, an exact small-step distribution oracle,
//!   and seeded Monte Carlo convergence experiments;
//! * [`dag`] — the labelled uniform recursive DAG that reproduces the urn,
//!   with exact coupling enumeration and ancestry-geometry statistics;
//! * [`chain`] — the m-dependent chain on the complete m-ary tree: exact
//!   distribution recursion, stationary distribution, geometric-decay
//!   certificates and the product-form check;
//! * [`catalog`] — named example tensors with their known constants.
//!
//! Everything is deterministic given explicit seeds; parallel replicates use
//! derived per-replicate streams so results do not depend on scheduling.

pub mod catalog;
pub mod chain;
pub mod dag;
pub mod error;
pub mod fixed_point;
pub mod index;
pub mod rng;
pub mod simplex;
pub mod stochastic;
pub mod tensor;
pub mod urn;

pub use error::{Error, Result};
pub use simplex::SimplexVector;
pub use stochastic::StochasticTensor;
pub use tensor::{AssumptionReport, ReplacementTensor, TensorFile};
