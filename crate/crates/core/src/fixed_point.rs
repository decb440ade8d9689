//! Fixed points of the normalized tensor map on the simplex.
//!
//! For a balanced replacement tensor the map `g(x) = R(x, ..., x) / sigma`
//! sends the simplex to itself. Its fixed points solve `sigma x = R(x, .., x)`
//! (the Z-eigenvector equation restricted to the simplex). When the
//! ergodicity bound holds the map is a contraction with modulus
//! `q = sum_s tau_s(R / sigma) < 1`, Picard iteration converges from any
//! start and the fixed point is unique; otherwise the solver still iterates
//! but reports plain, uncertified behaviour (including honest
//! non-convergence, which is itself informative for tensors like the
//! Li-Ng example where power iteration oscillates).

use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};
use crate::simplex::SimplexVector;
use crate::stochastic::StochasticTensor;
use crate::tensor::ReplacementTensor;
use rayon::prelude::*;
use serde::Serialize;

/// Default residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration budget; ample for any modulus up to ~0.999.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Converged (or, inside [`multi_start`], last-iterate) solver state.
#[derive(Debug, Clone, Serialize)]
pub struct FixedPointResult {
    /// The fixed point, or the last iterate when `converged` is false.
    pub x_star: SimplexVector,
    /// Number of map applications performed.
    pub iterations: usize,
    /// `|| R(x,..,x)/sigma - x ||_1` at the returned point.
    pub residual: f64,
    pub converged: bool,
    /// True iff the ergodicity bound held, so uniqueness is guaranteed.
    pub certified: bool,
    /// Contraction modulus used for the certificate; present iff certified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

/// One step of the normalized map: `R(x, ..., x) / sigma`.
///
/// The division is by the computed image mass (which equals `sigma` exactly
/// on the simplex); dividing by the constant instead lets the rounding error
/// of the mass compound by a factor `m` per iteration.
pub fn iterate_map(tensor: &ReplacementTensor, x: &SimplexVector) -> Result<SimplexVector> {
    tensor.sigma()?;
    let y = tensor.apply_diagonal(x.as_slice())?;
    SimplexVector::normalized(&y)
}

/// Picard iteration from the barycenter. See [`solve_from`].
pub fn solve(tensor: &ReplacementTensor, tol: f64, max_iter: usize) -> Result<FixedPointResult> {
    solve_from(
        tensor,
        &SimplexVector::barycenter(tensor.d()),
        tol,
        max_iter,
    )
}

/// Picard iteration from an arbitrary simplex start.
///
/// Certified runs stop once the step is at most `tol (1-q)/q`, which bounds
/// both the distance to the true fixed point and the final residual by
/// `tol`. Uncertified runs stop on a plain step tolerance and report
/// `MaxIterExceeded` (carrying the last iterate) when the budget runs out.
pub fn solve_from(
    tensor: &ReplacementTensor,
    start: &SimplexVector,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult> {
    let sigma = tensor.sigma()?;
    let report = tensor.validate();
    let certified = report.ergodicity_holds;
    let q = if certified {
        Some(
            StochasticTensor::from_replacement(tensor)?
                .ergodicity_coefficients()
                .q,
        )
    } else {
        None
    };
    let threshold = match q {
        Some(q) if q > 0.0 => tol * (1.0 - q) / q,
        Some(_) => f64::INFINITY, // constant map: one application lands on x*
        None => tol,
    };

    let mut x = start.clone();
    for t in 1..=max_iter {
        let raw = tensor.apply_diagonal(x.as_slice())?;
        let y = SimplexVector::normalized(&raw)?;
        let step = x.l1_distance(&y);
        if step <= threshold {
            let residual = residual(tensor, sigma, &y)?;
            return Ok(FixedPointResult {
                x_star: y,
                iterations: t,
                residual,
                converged: true,
                certified,
                q,
            });
        }
        x = y;
    }
    let residual = residual(tensor, sigma, &x)?;
    Err(Error::MaxIterExceeded {
        result: Box::new(FixedPointResult {
            x_star: x,
            iterations: max_iter,
            residual,
            converged: false,
            certified,
            q,
        }),
    })
}

fn residual(tensor: &ReplacementTensor, sigma: f64, x: &SimplexVector) -> Result<f64> {
    let y = tensor.apply_diagonal(x.as_slice())?;
    Ok(y.iter()
        .zip(x.as_slice())
        .map(|(v, xi)| (v / sigma - xi).abs())
        .sum())
}

/// All fixed points of a two-colour tensor, by a scan of
/// `f(p) = R((p,1-p),...)_1 - sigma p` over `p in [0, 1]`.
///
/// Sign changes are refined by bisection to width 1e-13. Grid points where
/// `|f|` dips below 1e-12 without a sign change catch tangency (double)
/// roots; maximal runs of such points collapse to the single best point, so
/// a map that is identically the identity reports one representative point
/// rather than the whole grid. Roots are deduplicated within 1e-10.
pub fn all_fixed_points_2colour(tensor: &ReplacementTensor) -> Result<Vec<SimplexVector>> {
    if tensor.d() != 2 {
        return Err(Error::NotTwoColour { d: tensor.d() });
    }
    let sigma = tensor.sigma()?;
    let f = |p: f64| -> f64 {
        let x = [p, 1.0 - p];
        tensor
            .apply_diagonal(&x)
            .expect("two-colour evaluation cannot fail")[0]
            - sigma * p
    };

    const CELLS: usize = 100_000;
    const TANGENT_TOL: f64 = 1e-12;
    const DEDUP_TOL: f64 = 1e-10;

    let grid: Vec<f64> = (0..=CELLS).map(|k| k as f64 / CELLS as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&p| f(p)).collect();

    let mut roots: Vec<f64> = Vec::new();

    // bisection on strict sign changes
    for k in 0..CELLS {
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 || fb == 0.0 {
            continue; // exact zeros are handled by the tangency scan
        }
        if fa.signum() != fb.signum() {
            let (mut a, mut b) = (grid[k], grid[k + 1]);
            let mut fa = fa;
            while b - a > 1e-13 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa.signum() != fm.signum() {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }

    // runs of grid points with |f| below tolerance: tangency roots and exact
    // grid hits; report the best point of each run
    let mut k = 0;
    while k <= CELLS {
        if values[k].abs() <= TANGENT_TOL {
            let start = k;
            while k < CELLS && values[k + 1].abs() <= TANGENT_TOL {
                k += 1;
            }
            let mid = (start + k) / 2;
            let best = (start..=k)
                .min_by(|&a, &b| {
                    (values[a].abs(), a.abs_diff(mid))
                        .partial_cmp(&(values[b].abs(), b.abs_diff(mid)))
                        .unwrap()
                })
                .unwrap();
            roots.push(grid[best]);
        }
        k += 1;
    }

    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= DEDUP_TOL);
    roots
        .into_iter()
        .map(|p| SimplexVector::new(vec![p, 1.0 - p]))
        .collect()
}

/// Run [`solve_from`] from the `d` simplex vertices and from `starts`
/// seeded uniform points of the simplex.
///
/// The vertex probes are deterministic extras: forward iteration cannot
/// reach a repelling fixed point from the interior, but a vertex that is
/// itself fixed (as in the LMS example with solutions (1/3, 2/3) and (1, 0))
/// is found immediately. Converged results are deduplicated within 1e-8;
/// non-converged runs are kept as reports. Order follows the start index, so
/// the output is independent of scheduling.
pub fn multi_start(
    tensor: &ReplacementTensor,
    starts: usize,
    seed: u64,
) -> Result<Vec<FixedPointResult>> {
    tensor.sigma()?;
    let d = tensor.d();
    let points: Vec<SimplexVector> = (0..d)
        .map(|i| SimplexVector::vertex(d, i))
        .chain((0..starts).map(|r| {
            let mut rng = SplitMix64::new(derive_seed(seed, r as u64));
            SimplexVector::new(rng.simplex_point(d)).expect("sampled point is on the simplex")
        }))
        .collect();

    let outcomes: Vec<FixedPointResult> = points
        .par_iter()
        .map(
            |p| match solve_from(tensor, p, DEFAULT_TOL, DEFAULT_MAX_ITER) {
                Ok(res) => Ok(res),
                Err(Error::MaxIterExceeded { result }) => Ok(*result),
                Err(e) => Err(e),
            },
        )
        .collect::<Result<_>>()?;

    let mut kept: Vec<FixedPointResult> = Vec::new();
    for out in outcomes {
        let duplicate = out.converged
            && kept
                .iter()
                .any(|k| k.converged && k.x_star.l1_distance(&out.x_star) <= 1e-8);
        if !duplicate {
            kept.push(out);
        }
    }
    Ok(kept)
}
