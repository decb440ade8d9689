//! Replacement tensors and their assumption report.
//!
//! A replacement tensor `R(i, j_1, ..., j_m)` gives the number of balls of
//! colour `i` added to an urn when the ordered draw is `(j_1, ..., j_m)`.
//! Three assumptions control the theory:
//!
//! * tenability: every entry is non-negative, so counts never go negative;
//! * balance: every draw column sums to the same `sigma > 0`, so total mass
//!   grows deterministically;
//! * ergodicity: `max_{j, j'} sum_i |R(i, j) - R(i, j')| < 2 sigma / m`,
//!   which makes `x -> R(x, ..., x) / sigma` a contraction on the simplex.
//!
//! Entries may be arbitrary non-negative reals; integrality is not required
//! by anything computed here.

use crate::error::{Error, Result};
use crate::index::{l1_distance, pow, rank, unrank};
use crate::stochastic::StochasticTensor;
use serde::{Deserialize, Serialize};

/// Relative tolerance used when deciding that all column sums agree.
pub const BALANCE_REL_TOL: f64 = 1e-12;

/// Dense `(m+1)`-mode replacement tensor over `d` colours.
///
/// Entries are stored row-major with the added-colour index `i` slowest and
/// the last draw slot fastest. Colours are `0..d` internally.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplacementTensor {
    d: usize,
    m: usize,
    entries: Vec<f64>,
    name: Option<String>,
}

/// On-disk JSON schema: `{"d": .., "m": .., "entries": [..], "name": ..?}`
/// with entries flattened row-major (`i` slowest, `j_m` fastest).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub d: usize,
    pub m: usize,
    pub entries: Vec<f64>,
}

impl ReplacementTensor {
    pub fn new(d: usize, m: usize, entries: Vec<f64>) -> Result<Self> {
        if d < 1 {
            return Err(Error::Structural("d must be at least 1".into()));
        }
        if m < 1 {
            return Err(Error::Structural("m must be at least 1".into()));
        }
        let expected = d
            .checked_pow(m as u32 + 1)
            .ok_or_else(|| Error::Structural(format!("d^(m+1) overflows for d={d}, m={m}")))?;
        if entries.len() != expected {
            return Err(Error::Structural(format!(
                "expected {expected} entries (d^(m+1) with d={d}, m={m}), got {}",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| !e.is_finite()) {
            return Err(Error::Structural(format!("entry {e} is not finite")));
        }
        Ok(Self {
            d,
            m,
            entries,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Number of ordered draw tuples, `d^m`.
    pub fn tuple_count(&self) -> usize {
        pow(self.d, self.m)
    }

    #[inline]
    fn flat(&self, colour: usize, draw_rank: usize) -> usize {
        colour * self.tuple_count() + draw_rank
    }

    /// Entry `R(colour, draw)` for a draw given by its tuple rank.
    #[inline]
    pub fn entry_ranked(&self, colour: usize, draw_rank: usize) -> f64 {
        self.entries[self.flat(colour, draw_rank)]
    }

    /// Entry `R(colour, j_1, ..., j_m)`.
    pub fn entry(&self, colour: usize, draw: &[usize]) -> f64 {
        self.entry_ranked(colour, rank(draw, self.d))
    }

    /// The column added when the ordered draw is `draw`:
    /// `(R(0, draw), ..., R(d-1, draw))`.
    pub fn column(&self, draw: &[usize]) -> Vec<f64> {
        self.column_ranked(rank(draw, self.d))
    }

    pub fn column_ranked(&self, draw_rank: usize) -> Vec<f64> {
        (0..self.d)
            .map(|i| self.entry_ranked(i, draw_rank))
            .collect()
    }

    /// Multilinear contraction `R(x_1, ..., x_m)`; accepts arbitrary real
    /// vectors of length `d` in each slot.
    pub fn apply(&self, args: &[&[f64]]) -> Result<Vec<f64>> {
        if args.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: args.len(),
            });
        }
        for a in args {
            if a.len() != self.d {
                return Err(Error::DimensionMismatch {
                    expected: self.d,
                    got: a.len(),
                });
            }
        }
        let mut out = vec![0.0; self.d];
        for draw_rank in 0..self.tuple_count() {
            let draw = unrank(draw_rank, self.d, self.m);
            let weight: f64 = draw.iter().zip(args).map(|(&j, a)| a[j]).product();
            if weight == 0.0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.entry_ranked(i, draw_rank) * weight;
            }
        }
        Ok(out)
    }

    /// `R(x, ..., x)` with the same vector in every slot.
    pub fn apply_diagonal(&self, x: &[f64]) -> Result<Vec<f64>> {
        let args: Vec<&[f64]> = (0..self.m).map(|_| x).collect();
        self.apply(&args)
    }

    fn column_sums(&self) -> Vec<f64> {
        (0..self.tuple_count())
            .map(|r| (0..self.d).map(|i| self.entry_ranked(i, r)).sum())
            .collect()
    }

    /// The common column sum, or `NotBalanced` if the sums disagree.
    pub fn sigma(&self) -> Result<f64> {
        let report = self.validate();
        report.sigma.ok_or(Error::NotBalanced {
            deviation: report.balance_deviation,
        })
    }

    /// Check tenability, balance and the ergodicity bound exactly.
    pub fn validate(&self) -> AssumptionReport {
        let tenable = self.entries.iter().all(|&e| e >= 0.0);

        let sums = self.column_sums();
        let mean: f64 = sums.iter().sum::<f64>() / sums.len() as f64;
        let balance_deviation = sums.iter().map(|s| (s - mean).abs()).fold(0.0f64, f64::max);
        let balanced = mean > 0.0 && balance_deviation <= BALANCE_REL_TOL * mean.max(1.0);
        let sigma = balanced.then_some(mean);

        // max over ordered draw tuples j, j' of sum_i |R(i,j) - R(i,j')|
        let columns: Vec<Vec<f64>> = (0..self.tuple_count())
            .map(|r| self.column_ranked(r))
            .collect();
        let mut ergodicity_lhs = 0.0f64;
        for a in 0..columns.len() {
            for b in (a + 1)..columns.len() {
                ergodicity_lhs = ergodicity_lhs.max(l1_distance(&columns[a], &columns[b]));
            }
        }

        let ergodicity_bound = sigma.map(|s| 2.0 * s / self.m as f64);
        let boundary =
            ergodicity_bound.is_some_and(|b| (ergodicity_lhs - b).abs() <= 1e-12 * b.max(1.0));
        let ergodicity_holds = !boundary && ergodicity_bound.is_some_and(|b| ergodicity_lhs < b);

        // Exact tau sum of the induced chain tensor: each slot coefficient is
        // ergodicity_lhs / (2 sigma) because the other factors sum out to
        // sigma^(m-1) under balance.
        let q_estimate = if ergodicity_holds {
            sigma.map(|s| self.m as f64 * ergodicity_lhs / (2.0 * s))
        } else {
            None
        };

        AssumptionReport {
            tenable,
            sigma,
            balance_deviation,
            ergodicity_lhs,
            ergodicity_bound,
            ergodicity_holds,
            boundary,
            q_estimate,
        }
    }

    /// Transition tensor of the induced chain on the tuple state space
    /// `S = {0..d}^m`:
    ///
    /// `T(x, a_1, ..., a_m) = prod_s R(x_s, a_s) / sigma^m`
    ///
    /// where `x` and each `a_s` are tuple states. Slice sums equal 1 by
    /// balance. States are ranked with the first tuple slot most significant.
    pub fn induced_chain_tensor(&self) -> Result<StochasticTensor> {
        let sigma = self.sigma()?;
        let s = self.tuple_count();
        let m = self.m;
        let budget = (1u64 << 24) as f64;
        let size = (s as f64).powi(m as i32 + 1);
        if size > budget {
            return Err(Error::TooLarge { size, budget });
        }
        let cond_count = pow(s, m);
        let mut entries = vec![0.0; s * cond_count];
        let sigma_m = sigma.powi(m as i32);
        for x in 0..s {
            let x_tuple = unrank(x, self.d, m);
            for cond in 0..cond_count {
                let parents = unrank(cond, s, m);
                let mut p = 1.0;
                for (slot, &a) in parents.iter().enumerate() {
                    p *= self.entry_ranked(x_tuple[slot], a);
                }
                entries[x * cond_count + cond] = p / sigma_m;
            }
        }
        StochasticTensor::new(s, m, entries)
    }

    pub fn to_file(&self) -> TensorFile {
        TensorFile {
            name: self.name.clone(),
            d: self.d,
            m: self.m,
            entries: self.entries.clone(),
        }
    }

    pub fn from_file(file: TensorFile) -> Result<Self> {
        let t = Self::new(file.d, file.m, file.entries)?;
        Ok(match file.name {
            Some(n) => t.with_name(n),
            None => t,
        })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: TensorFile =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("tensor serializes")
    }
}

/// Outcome of the assumption checks on a replacement tensor.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    /// All entries non-negative.
    pub tenable: bool,
    /// Common column sum; absent when the sums disagree.
    pub sigma: Option<f64>,
    /// Max over draw tuples of the column-sum deviation from the mean sum.
    pub balance_deviation: f64,
    /// `max_{j,j'} sum_i |R(i,j) - R(i,j')]` over ordered draw tuples.
    pub ergodicity_lhs: f64,
    /// `2 sigma / m`; absent when unbalanced. For `m = 2` this equals sigma.
    pub ergodicity_bound: Option<f64>,
    /// Strict comparison `lhs < bound`; false on the boundary.
    pub ergodicity_holds: bool,
    /// The lhs equals the bound up to rounding; the contraction argument
    /// needs strict inequality so this is surfaced separately.
    pub boundary: bool,
    /// Tau sum of the induced chain tensor, `m * lhs / (2 sigma)`;
    /// present iff the ergodicity bound holds (then it is `< 1`).
    pub q_estimate: Option<f64>,
}

impl AssumptionReport {
    /// All three assumptions hold.
    pub fn all_hold(&self) -> bool {
        self.tenable && self.sigma.is_some() && self.ergodicity_holds
    }
}
