//! Error type shared by all modules.

use crate::fixed_point::FixedPointResult;
use thiserror::Error;

/// Errors produced by tensor construction, solvers and simulators.
#[derive(Debug, Error)]
pub enum Error {
    /// The flat entry array does not match `d^(m+1)`, or `d`/`m` are out of
    /// range, or an entry is not a finite number.
    #[error("structural error: {0}")]
    Structural(String),

    /// An argument vector has the wrong length for the tensor it is used with.
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The tensor has no common column sum, so `sigma` is undefined.
    #[error("tensor is not balanced: column sums deviate by {deviation:e}")]
    NotBalanced { deviation: f64 },

    /// A coordinate left `[0, inf)` or the mass check failed.
    #[error("not a simplex vector: {0}")]
    NotSimplex(String),

    /// The two-colour analytic root scan was asked for a tensor with d != 2.
    #[error("operation requires exactly 2 colours, tensor has {d}")]
    NotTwoColour { d: usize },

    /// Picard iteration hit the iteration budget; carries the last iterate.
    #[error("no convergence after {} iterations (residual {:e})", result.iterations, result.residual)]
    MaxIterExceeded { result: Box<FixedPointResult> },

    /// The urn contains no mass, so nothing can be drawn.
    #[error("empty urn: total mass is not positive")]
    EmptyUrn,

    /// An exact enumeration would exceed the configured budget.
    #[error("exact enumeration too large: {size:e} outcomes exceeds budget {budget:e}")]
    TooLarge { size: f64, budget: f64 },

    /// A node id outside the grown graph was requested.
    #[error("node {node} out of range: graph has nodes 0..={max}")]
    NodeOutOfRange { node: u64, max: u64 },

    /// Leaf profile size does not match `m^depth`.
    #[error("depth mismatch: depth {depth} with arity {arity} needs {expected} leaves, got {got}")]
    DepthMismatch {
        depth: usize,
        arity: usize,
        expected: usize,
        got: usize,
    },

    /// The transition tensor has ergodicity coefficient sum >= 1 and the
    /// stationary iteration did not converge.
    #[error("not contractive: tau sum q = {q} >= 1 and iteration did not settle")]
    NotContractive { q: f64 },

    /// A level of the distribution recursion exceeded its certified bound.
    /// This indicates an implementation bug, not a modelling failure.
    #[error("certificate violated at level {level}: error {error:e} > bound {bound:e}")]
    CertificateViolated {
        level: usize,
        error: f64,
        bound: f64,
    },

    /// Input file could not be read or did not parse against the schema.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
