//! The m-dependent chain on the complete m-ary tree: exact distribution
//! recursion, stationary distribution, geometric-decay certificates, and the
//! product-form check.
//!
//! Leaves sit at level 0; node `i` (0-based) of level `k` combines the
//! level-`k-1` nodes `m i + r`, `r = 0..m`, through the transition tensor:
//!
//! `pi_i^(k)(w) = sum T(w, s_1, ..., s_m) prod_r pi_{m i + r}^(k-1)(s_r)`
//!
//! The root marginal after `depth` levels is exact dense arithmetic, no
//! sampling. When the tau sum `q` of the tensor is below 1 the per-level
//! worst-case error to the stationary distribution decays like `q^k`, which
//! `geometric_certificate` verifies level by level.

use crate::error::{Error, Result};
use crate::index::{pow, unrank};
use crate::rng::SplitMix64;
use crate::simplex::SimplexVector;
use crate::stochastic::StochasticTensor;
use rayon::prelude::*;

/// Default residual tolerance for the stationary solve.
pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 10_000;

/// Initial distributions for the `m^depth` leaf positions.
#[derive(Debug, Clone)]
pub struct LeafProfile {
    pub distributions: Vec<SimplexVector>,
    pub depth: usize,
}

impl LeafProfile {
    pub fn new(distributions: Vec<SimplexVector>, depth: usize) -> Self {
        Self {
            distributions,
            depth,
        }
    }

    /// All leaves uniform on the state space.
    pub fn uniform(state_size: usize, arity: usize, depth: usize) -> Self {
        let leaf = SimplexVector::barycenter(state_size);
        Self {
            distributions: vec![leaf; pow(arity, depth)],
            depth,
        }
    }

    /// All leaves a point mass at one state.
    pub fn point_mass(state: usize, state_size: usize, arity: usize, depth: usize) -> Self {
        let leaf = SimplexVector::vertex(state_size, state);
        Self {
            distributions: vec![leaf; pow(arity, depth)],
            depth,
        }
    }
}

/// Output of [`evolve`].
#[derive(Debug, Clone)]
pub struct ChainResult {
    /// Root marginal `pi_1^(depth)`.
    pub root: SimplexVector,
    /// `max_i || pi_i^(k) - pi ||_1` for each level `k = 0..=depth`.
    pub per_level_max_error: Vec<f64>,
    /// Tau sum of the tensor.
    pub q: f64,
    /// Stationary distribution the errors are measured against.
    pub stationary: SimplexVector,
}

/// Run the distribution recursion from the leaves to the root.
pub fn evolve(t: &StochasticTensor, leaves: &LeafProfile) -> Result<ChainResult> {
    let m = t.arity();
    let expected = pow(m, leaves.depth);
    if leaves.distributions.len() != expected {
        return Err(Error::DepthMismatch {
            depth: leaves.depth,
            arity: m,
            expected,
            got: leaves.distributions.len(),
        });
    }
    for leaf in &leaves.distributions {
        if leaf.len() != t.state_size() {
            return Err(Error::DimensionMismatch {
                expected: t.state_size(),
                got: leaf.len(),
            });
        }
    }
    let q = t.ergodicity_coefficients().q;
    let pi = stationary(t, DEFAULT_TOL)?.distribution;

    let max_err = |level: &[SimplexVector]| -> f64 {
        level
            .iter()
            .map(|p| p.l1_distance(&pi))
            .fold(0.0f64, f64::max)
    };

    let mut level: Vec<SimplexVector> = leaves.distributions.clone();
    let mut per_level_max_error = vec![max_err(&level)];
    for _ in 0..leaves.depth {
        let next: Vec<SimplexVector> = (0..level.len() / m)
            .into_par_iter()
            .map(|i| {
                let args: Vec<&[f64]> = (0..m).map(|r| level[m * i + r].as_slice()).collect();
                SimplexVector::normalized(&t.contract(&args)?)
            })
            .collect::<Result<_>>()?;
        per_level_max_error.push(max_err(&next));
        level = next;
    }
    debug_assert_eq!(level.len(), 1);
    Ok(ChainResult {
        root: level.pop().expect("root level is non-empty"),
        per_level_max_error,
        q,
        stationary: pi,
    })
}

/// Stationary solve output; `certified` records whether the tau sum was
/// below 1 (uniqueness guaranteed) or the iteration merely settled.
#[derive(Debug, Clone)]
pub struct StationaryResult {
    pub distribution: SimplexVector,
    pub certified: bool,
    pub iterations: usize,
}

/// Fixed point of `pi -> T(pi, ..., pi)` on the simplex over the state
/// space, by Picard iteration from the uniform distribution.
///
/// A tau sum `q < 1` certifies uniqueness and fixes the stopping rule; when
/// `q >= 1` the iteration is still attempted and failure to settle is
/// reported as `NotContractive`.
pub fn stationary(t: &StochasticTensor, tol: f64) -> Result<StationaryResult> {
    let q = t.ergodicity_coefficients().q;
    let certified = q < 1.0;
    let threshold = if certified && q > 0.0 {
        tol * (1.0 - q) / q
    } else if certified {
        f64::INFINITY
    } else {
        tol
    };
    let mut pi = SimplexVector::barycenter(t.state_size());
    for it in 1..=MAX_ITER {
        // normalize by the computed mass so rounding does not compound
        let next = SimplexVector::normalized(&t.contract_diagonal(pi.as_slice())?)?;
        if pi.l1_distance(&next) <= threshold {
            return Ok(StationaryResult {
                distribution: next,
                certified,
                iterations: it,
            });
        }
        pi = next;
    }
    Err(Error::NotContractive { q })
}

/// Result of the product-form test `T(nu^m, ..., nu^m) = nu^m`.
#[derive(Debug, Clone)]
pub struct ProductFormCheck {
    pub holds: bool,
    /// `|| T(pi', ..., pi') - pi' ||_1` for `pi' = nu ⊗ ... ⊗ nu`.
    pub defect: f64,
}

/// Threshold on the product-form defect.
pub const PRODUCT_FORM_TOL: f64 = 1e-10;

/// Check whether the m-fold product of a colour distribution is stationary
/// for an induced chain tensor. For `nu` solving `sigma nu = R(nu, .., nu)`
/// the defect vanishes; for other points it is macroscopic.
pub fn verify_product_form(
    t_induced: &StochasticTensor,
    nu: &SimplexVector,
) -> Result<ProductFormCheck> {
    let m = t_induced.arity();
    let d = nu.len();
    if pow(d, m) != t_induced.state_size() {
        return Err(Error::DimensionMismatch {
            expected: t_induced.state_size(),
            got: pow(d, m),
        });
    }
    let product: Vec<f64> = (0..t_induced.state_size())
        .map(|state| unrank(state, d, m).into_iter().map(|c| nu.get(c)).product())
        .collect();
    let image = t_induced.contract_diagonal(&product)?;
    let defect: f64 = image.iter().zip(&product).map(|(a, b)| (a - b).abs()).sum();
    Ok(ProductFormCheck {
        holds: defect <= PRODUCT_FORM_TOL,
        defect,
    })
}

/// One row of the geometric-decay certificate.
#[derive(Debug, Clone)]
pub struct CertificateLevel {
    pub level: usize,
    pub max_error: f64,
    /// `q^level * max_error(0)`.
    pub bound: f64,
}

/// Slack allowed over the exact bound, absorbing dense-arithmetic rounding.
pub const CERTIFICATE_SLACK: f64 = 1e-10;

/// Verify `max_i ||pi_i^(k) - pi||_1 <= q^k max_i ||pi_i^(0) - pi||_1` at
/// every level. Requires `q < 1`; a violation indicates an implementation
/// bug rather than a modelling failure.
pub fn geometric_certificate(
    t: &StochasticTensor,
    leaves: &LeafProfile,
) -> Result<Vec<CertificateLevel>> {
    let result = evolve(t, leaves)?;
    if result.q >= 1.0 {
        return Err(Error::NotContractive { q: result.q });
    }
    let err0 = result.per_level_max_error[0];
    let rows: Vec<CertificateLevel> = result
        .per_level_max_error
        .iter()
        .enumerate()
        .map(|(level, &max_error)| CertificateLevel {
            level,
            max_error,
            bound: result.q.powi(level as i32) * err0,
        })
        .collect();
    for row in &rows {
        if row.max_error > row.bound + CERTIFICATE_SLACK {
            return Err(Error::CertificateViolated {
                level: row.level,
                error: row.max_error,
                bound: row.bound,
            });
        }
    }
    Ok(rows)
}

/// Forward-simulate one labelling of the tree and return the root state.
/// Exposed for demonstration and sampling cross-checks; certificates use
/// the exact recursion.
pub fn sample_root(t: &StochasticTensor, leaves: &LeafProfile, seed: u64) -> Result<usize> {
    let m = t.arity();
    let expected = pow(m, leaves.depth);
    if leaves.distributions.len() != expected {
        return Err(Error::DepthMismatch {
            depth: leaves.depth,
            arity: m,
            expected,
            got: leaves.distributions.len(),
        });
    }
    let mut rng = SplitMix64::new(seed);
    let mut level: Vec<usize> = leaves
        .distributions
        .iter()
        .map(|p| rng.categorical(p.as_slice(), 1.0))
        .collect();
    while level.len() > 1 {
        let cond_count = pow(t.state_size(), m);
        level = (0..level.len() / m)
            .map(|i| {
                let cond = level[m * i..m * (i + 1)]
                    .iter()
                    .fold(0usize, |acc, &s| acc * t.state_size() + s);
                let weights: Vec<f64> = (0..t.state_size())
                    .map(|w| t.entries()[w * cond_count + cond])
                    .collect();
                rng.categorical(&weights, 1.0)
            })
            .collect();
    }
    Ok(level[0])
}
