//! Stochastic transition tensors and their ergodicity coefficients.
//!
//! A stochastic tensor `T(w, s_1, ..., s_m)` gives the distribution of a new
//! state `w` conditioned on `m` parent states. The per-slot ergodicity
//! coefficient
//!
//! `tau_s(T) = 1/2 max sum_w |T(w, ..) - T(w, ..)|`
//!
//! maximized over conditioning tuples differing only in slot `s`, is the
//! worst-case L1 contraction factor of the slot-`s` partial map (the analogue
//! of Dobrushin's coefficient for a transition matrix). When the sum
//! `q = sum_s tau_s` is below 1, the map `pi -> T(pi, ..., pi)` is a
//! contraction and the chain's distribution recursion converges geometrically.

use crate::error::{Error, Result};
use crate::index::{pow, rank, unrank};

/// Tolerance on conditional slice sums.
pub const SLICE_TOL: f64 = 1e-12;

/// Dense stochastic tensor on states `0..state_size` with `arity`
/// conditioning slots. Entries are flattened with the outcome state slowest
/// and the last conditioning slot fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticTensor {
    state_size: usize,
    arity: usize,
    entries: Vec<f64>,
}

/// Per-slot coefficients and their sum.
#[derive(Debug, Clone)]
pub struct ErgodicityCoefficients {
    pub taus: Vec<f64>,
    pub q: f64,
}

impl StochasticTensor {
    pub fn new(state_size: usize, arity: usize, entries: Vec<f64>) -> Result<Self> {
        if state_size < 1 {
            return Err(Error::Structural("state_size must be at least 1".into()));
        }
        if arity < 1 {
            return Err(Error::Structural("arity must be at least 1".into()));
        }
        let cond_count = state_size
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::Structural("state space overflows".into()))?;
        let expected = cond_count
            .checked_mul(state_size)
            .ok_or_else(|| Error::Structural("entry count overflows".into()))?;
        if entries.len() != expected {
            return Err(Error::Structural(format!(
                "expected {expected} entries, got {}",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| !e.is_finite() || **e < 0.0) {
            return Err(Error::Structural(format!(
                "entry {e} is negative or not finite"
            )));
        }
        for cond in 0..cond_count {
            let sum: f64 = (0..state_size)
                .map(|w| entries[w * cond_count + cond])
                .sum();
            if (sum - 1.0).abs() > SLICE_TOL {
                return Err(Error::Structural(format!(
                    "conditional slice {cond} sums to {sum}, not 1"
                )));
            }
        }
        Ok(Self {
            state_size,
            arity,
            entries,
        })
    }

    /// View a balanced replacement tensor as the colour-level stochastic
    /// tensor `R / sigma` (states are colours, slots are draw positions).
    pub fn from_replacement(r: &crate::tensor::ReplacementTensor) -> Result<Self> {
        let sigma = r.sigma()?;
        Self::new(
            r.d(),
            r.m(),
            r.entries().iter().map(|e| e / sigma).collect(),
        )
    }

    pub fn state_size(&self) -> usize {
        self.state_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    fn cond_count(&self) -> usize {
        pow(self.state_size, self.arity)
    }

    #[inline]
    pub fn entry_ranked(&self, state: usize, cond_rank: usize) -> f64 {
        self.entries[state * self.cond_count() + cond_rank]
    }

    /// Entry `T(state, s_1, ..., s_m)`.
    pub fn entry(&self, state: usize, cond: &[usize]) -> f64 {
        self.entry_ranked(state, rank(cond, self.state_size))
    }

    /// Multilinear contraction `T(pi_1, ..., pi_m)` over the state space.
    pub fn contract(&self, args: &[&[f64]]) -> Result<Vec<f64>> {
        if args.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        for a in args {
            if a.len() != self.state_size {
                return Err(Error::DimensionMismatch {
                    expected: self.state_size,
                    got: a.len(),
                });
            }
        }
        let cond_count = self.cond_count();
        let mut out = vec![0.0; self.state_size];
        for cond in 0..cond_count {
            let digits = unrank(cond, self.state_size, self.arity);
            let weight: f64 = digits.iter().zip(args).map(|(&s, a)| a[s]).product();
            if weight == 0.0 {
                continue;
            }
            for (w, o) in out.iter_mut().enumerate() {
                *o += self.entries[w * cond_count + cond] * weight;
            }
        }
        Ok(out)
    }

    /// `T(pi, ..., pi)` with the same distribution in every slot.
    pub fn contract_diagonal(&self, pi: &[f64]) -> Result<Vec<f64>> {
        let args: Vec<&[f64]> = (0..self.arity).map(|_| pi).collect();
        self.contract(&args)
    }

    /// Per-slot ergodicity coefficients `(tau_1, ..., tau_m)` and their sum.
    ///
    /// `tau_s` is half the max L1 distance between conditional distributions
    /// whose conditioning tuples differ only in slot `s`; the max over the
    /// definitional supremum of simplex arguments is attained at vertices,
    /// which is what the enumeration below walks.
    pub fn ergodicity_coefficients(&self) -> ErgodicityCoefficients {
        let s = self.state_size;
        let cond_count = self.cond_count();
        let mut taus = vec![0.0f64; self.arity];
        for (slot, tau) in taus.iter_mut().enumerate() {
            // stride of this slot in the ranked conditioning index
            let stride = pow(s, self.arity - 1 - slot);
            let others = cond_count / s;
            for other in 0..others {
                // base rank with slot digit zero, other digits from `other`
                let high = other / stride;
                let low = other % stride;
                let base = high * stride * s + low;
                for v in 0..s {
                    for v2 in (v + 1)..s {
                        let ca = base + v * stride;
                        let cb = base + v2 * stride;
                        let mut dist = 0.0;
                        for w in 0..s {
                            dist += (self.entries[w * cond_count + ca]
                                - self.entries[w * cond_count + cb])
                                .abs();
                        }
                        *tau = tau.max(0.5 * dist);
                    }
                }
            }
        }
        let q = taus.iter().sum();
        ErgodicityCoefficients { taus, q }
    }
}
