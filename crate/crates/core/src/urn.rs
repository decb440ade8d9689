//! The multi-drawing urn process: direct simulation, an exact small-step
//! distribution oracle, and seeded Monte Carlo convergence runs.
//!
//! One step draws an ordered `m`-tuple of colours with replacement
//! (i.i.d. proportional to current counts) and adds the tensor column of the
//! draw. Balance makes the total mass deterministic:
//! `||U(n)||_1 = ||U(0)||_1 + sigma n`.

use crate::error::{Error, Result};
use crate::fixed_point;
use crate::rng::{derive_seed, SplitMix64};
use crate::simplex::SimplexVector;
use crate::tensor::ReplacementTensor;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Colour counts of the urn at a step. Counts are reals: replacement
/// entries need not be integers.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnState {
    pub counts: Vec<f64>,
    pub step: u64,
    pub sigma: f64,
}

impl UrnState {
    pub fn new(counts: Vec<f64>, sigma: f64) -> Result<Self> {
        if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Structural(
                "urn counts must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            counts,
            step: 0,
            sigma,
        })
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Normalized composition `U(n) / ||U(n)||_1`.
    pub fn composition(&self) -> Result<SimplexVector> {
        SimplexVector::normalized(&self.counts)
    }
}

/// An ordered draw `(c_1, ..., c_m)`, colours `0..d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrawOutcome {
    pub colours: Vec<usize>,
}

/// Draw `m` colours i.i.d. proportional to the current counts.
pub fn draw(state: &UrnState, m: usize, rng: &mut SplitMix64) -> Result<DrawOutcome> {
    let total = state.total();
    if total <= 0.0 {
        return Err(Error::EmptyUrn);
    }
    let colours = (0..m)
        .map(|_| rng.categorical(&state.counts, total))
        .collect();
    Ok(DrawOutcome { colours })
}

/// One urn step: draw a tuple and add its replacement column.
pub fn step(
    state: &UrnState,
    tensor: &ReplacementTensor,
    rng: &mut SplitMix64,
) -> Result<UrnState> {
    if state.counts.len() != tensor.d() {
        return Err(Error::DimensionMismatch {
            expected: tensor.d(),
            got: state.counts.len(),
        });
    }
    let outcome = draw(state, tensor.m(), rng)?;
    let mut counts = state.counts.clone();
    let column = tensor.column(&outcome.colours);
    for (c, add) in counts.iter_mut().zip(&column) {
        *c += add;
    }
    Ok(UrnState {
        counts,
        step: state.step + 1,
        sigma: state.sigma,
    })
}

/// Log-spaced checkpoint steps `floor(10^(k/4))` up to and including `n`.
pub fn checkpoints(n: u64) -> Vec<u64> {
    let mut points = Vec::new();
    let mut k = 0u32;
    loop {
        let p = 10f64.powf(k as f64 / 4.0).floor() as u64;
        if p > n {
            break;
        }
        points.push(p);
        k += 1;
    }
    points.push(n);
    points.sort_unstable();
    points.dedup();
    points
}

/// A finished trajectory: final state plus normalized compositions at the
/// checkpoint steps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: UrnState,
    pub checkpoints: Vec<(u64, SimplexVector)>,
}

/// Run `n` seeded steps, recording compositions at [`checkpoints`].
pub fn run(
    tensor: &ReplacementTensor,
    initial: &UrnState,
    n: u64,
    seed: u64,
) -> Result<Trajectory> {
    if initial.counts.len() != tensor.d() {
        return Err(Error::DimensionMismatch {
            expected: tensor.d(),
            got: initial.counts.len(),
        });
    }
    let mut rng = SplitMix64::new(seed);
    let marks = checkpoints(n);
    let mut recorded = Vec::with_capacity(marks.len());
    let mut next_mark = 0usize;

    let m = tensor.m();
    let mut counts = initial.counts.clone();
    let mut colours = vec![0usize; m];
    for t in initial.step..=initial.step + n {
        if next_mark < marks.len() && t - initial.step == marks[next_mark] {
            recorded.push((marks[next_mark], SimplexVector::normalized(&counts)?));
            next_mark += 1;
        }
        if t == initial.step + n {
            break;
        }
        let total: f64 = counts.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyUrn);
        }
        for c in colours.iter_mut() {
            *c = rng.categorical(&counts, total);
        }
        let rank = crate::index::rank(&colours, tensor.d());
        for (i, c) in counts.iter_mut().enumerate() {
            *c += tensor.entry_ranked(i, rank);
        }
    }
    Ok(Trajectory {
        final_state: UrnState {
            counts,
            step: initial.step + n,
            sigma: initial.sigma,
        },
        checkpoints: recorded,
    })
}

/// Exact distribution of the counts after `n` steps, by enumeration over all
/// `d^(m n)` draw sequences with coinciding states merged. Guarded by a
/// `d^(m n) <= 10^6` budget.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    outcomes: BTreeMap<Vec<i64>, (Vec<f64>, f64)>,
}

/// Quantization grid for merging float count vectors: well below any genuine
/// gap between distinct reachable states at oracle scale, well above
/// accumulated rounding.
const KEY_SCALE: f64 = 1e9;

fn key_of(counts: &[f64]) -> Vec<i64> {
    counts
        .iter()
        .map(|c| (c * KEY_SCALE).round() as i64)
        .collect()
}

impl ExactDistribution {
    pub fn new_empty() -> Self {
        Self {
            outcomes: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, counts: &[f64], prob: f64) {
        let entry = self
            .outcomes
            .entry(key_of(counts))
            .or_insert_with(|| (counts.to_vec(), 0.0));
        entry.1 += prob;
    }

    /// Support points with probabilities, in deterministic key order.
    pub fn support(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.outcomes.values().map(|(c, p)| (c.as_slice(), *p))
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.values().map(|(_, p)| p).sum()
    }

    /// Total variation distance `1/2 sum |p - q|` over the union of supports.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let mut sum = 0.0;
        for (key, (_, p)) in &self.outcomes {
            let q = other.outcomes.get(key).map_or(0.0, |(_, q)| *q);
            sum += (p - q).abs();
        }
        for (key, (_, q)) in &other.outcomes {
            if !self.outcomes.contains_key(key) {
                sum += q;
            }
        }
        0.5 * sum
    }
}

pub fn exact_distribution(
    tensor: &ReplacementTensor,
    initial: &UrnState,
    n: u64,
) -> Result<ExactDistribution> {
    if initial.counts.len() != tensor.d() {
        return Err(Error::DimensionMismatch {
            expected: tensor.d(),
            got: initial.counts.len(),
        });
    }
    let budget = 1e6;
    let size = (tensor.d() as f64).powf(tensor.m() as f64 * n as f64);
    if size > budget {
        return Err(Error::TooLarge { size, budget });
    }
    let tuple_count = tensor.tuple_count();
    let d = tensor.d();
    let m = tensor.m();

    let mut current = ExactDistribution::new_empty();
    current.add(&initial.counts, 1.0);
    for _ in 0..n {
        let mut next = ExactDistribution::new_empty();
        for (counts, prob) in current.support() {
            let total: f64 = counts.iter().sum();
            if total <= 0.0 {
                return Err(Error::EmptyUrn);
            }
            for tuple_rank in 0..tuple_count {
                let tuple = crate::index::unrank(tuple_rank, d, m);
                let p_draw: f64 = tuple.iter().map(|&c| counts[c] / total).product();
                if p_draw == 0.0 {
                    continue;
                }
                let mut new_counts = counts.to_vec();
                for (i, c) in new_counts.iter_mut().enumerate() {
                    *c += tensor.entry_ranked(i, tuple_rank);
                }
                next.add(&new_counts, prob * p_draw);
            }
        }
        current = next;
    }
    Ok(current)
}

/// Mean L1 distance of the composition to a target point, per checkpoint,
/// over seeded independent replicates.
#[derive(Debug, Clone)]
pub struct TrajectoryStats {
    pub n_values: Vec<u64>,
    pub mean_l1_error: Vec<f64>,
    pub stderr: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    /// The reference point the errors are measured against.
    pub target: SimplexVector,
}

/// Monte Carlo convergence experiment.
///
/// Replicate `r` runs with the derived seed `derive_seed(seed, r)`; the
/// target defaults to the solver's fixed point when not supplied (the
/// ergodicity bound is not required, so counterexample studies pass their
/// own reference point). Aggregation is in fixed replicate order.
pub fn monte_carlo(
    tensor: &ReplacementTensor,
    initial: &UrnState,
    n: u64,
    replicates: usize,
    seed: u64,
    target: Option<&SimplexVector>,
) -> Result<TrajectoryStats> {
    if replicates == 0 {
        return Err(Error::Structural("at least one replicate required".into()));
    }
    let target = match target {
        Some(t) => t.clone(),
        None => {
            fixed_point::solve(
                tensor,
                fixed_point::DEFAULT_TOL,
                fixed_point::DEFAULT_MAX_ITER,
            )?
            .x_star
        }
    };
    if target.len() != tensor.d() {
        return Err(Error::DimensionMismatch {
            expected: tensor.d(),
            got: target.len(),
        });
    }
    let marks = checkpoints(n);
    let per_replicate: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let traj = run(tensor, initial, n, derive_seed(seed, r as u64))?;
            Ok(traj
                .checkpoints
                .iter()
                .map(|(_, comp)| comp.l1_distance(&target))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut mean = vec![0.0f64; marks.len()];
    for errs in &per_replicate {
        for (m, e) in mean.iter_mut().zip(errs) {
            *m += e;
        }
    }
    for m in &mut mean {
        *m /= replicates as f64;
    }
    let mut stderr = vec![0.0f64; marks.len()];
    if replicates > 1 {
        for errs in &per_replicate {
            for ((s, e), m) in stderr.iter_mut().zip(errs).zip(&mean) {
                *s += (e - m) * (e - m);
            }
        }
        for s in &mut stderr {
            *s = (*s / (replicates as f64 - 1.0)).sqrt() / (replicates as f64).sqrt();
        }
    }
    Ok(TrajectoryStats {
        n_values: marks,
        mean_l1_error: mean,
        stderr,
        replicates,
        seed,
        target,
    })
}
