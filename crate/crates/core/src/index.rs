//! Mixed-radix helpers for flattening colour tuples and state indices.
//!
//! Throughout the crate a tuple `(t_1, ..., t_m)` of colours in `0..d` is
//! ranked with `t_1` most significant: `rank = sum t_k * d^(m-k)`. The same
//! convention flattens tensor entries (first index slowest).

/// `base^exp` with overflow checks; panics on overflow since sizes are
/// validated against budgets before this is called.
pub fn pow(base: usize, exp: usize) -> usize {
    base.checked_pow(exp as u32)
        .expect("index space overflows usize")
}

/// Decode `rank` into `len` digits in `0..base`, most significant first.
pub fn unrank(mut rank: usize, base: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0usize; len];
    for slot in (0..len).rev() {
        digits[slot] = rank % base;
        rank /= base;
    }
    digits
}

/// Inverse of [`unrank`].
pub fn rank(digits: &[usize], base: usize) -> usize {
    digits.iter().fold(0, |acc, &d| {
        debug_assert!(d < base);
        acc * base + d
    })
}

/// L1 distance between two equal-length slices.
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_roundtrip() {
        for base in 1..5 {
            for len in 0..4 {
                for r in 0..pow(base, len) {
                    assert_eq!(rank(&unrank(r, base, len), base), r);
                }
            }
        }
    }

    #[test]
    fn most_significant_first() {
        assert_eq!(unrank(5, 2, 3), vec![1, 0, 1]);
        assert_eq!(rank(&[1, 0, 1], 2), 5);
    }
}
