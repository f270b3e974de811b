//! Integer functions on degrees: binary digit sums, 2-adic valuation,
//! the minimal spike length `mu`, and the stabilization bound `t(k, d)`.

use crate::error::{invalid, Result};

/// Number of ones in the binary expansion of `n`.
#[inline]
pub fn alpha(n: u64) -> u32 {
    n.count_ones()
}

/// 2-adic valuation of `n`. Undefined for zero.
pub fn zeta(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(invalid("zeta(0) is undefined"));
    }
    Ok(n.trailing_zeros())
}

/// The smallest `r` such that `n` is a sum of `r` numbers of the form `2^u - 1`, `u > 0`.
///
/// Uses the characterization `mu(n) = min { r : alpha(n + r) <= r }`.
pub fn mu(n: u64) -> u32 {
    let mut r = 0u64;
    loop {
        if alpha(n + r) as u64 <= r {
            return r as u32;
        }
        r += 1;
    }
}

/// `t(k, d) = max{0, k - alpha(d + k) - zeta(d + k)}`.
pub fn t_bound(k: u32, d: u64) -> u32 {
    let m = d + k as u64;
    // k >= 1 keeps m positive
    let z = m.trailing_zeros();
    (k as i64 - alpha(m) as i64 - z as i64).max(0) as u32
}

/// Binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Parity of `C(a, i)` by Lucas' theorem: odd iff the bits of `i` are a submask of `a`.
#[inline]
pub fn binomial_is_odd(a: u64, i: u64) -> bool {
    i & !a == 0
}

/// Number of monomials of degree `n` in `k` variables.
pub fn monomial_count(k: u32, n: u64) -> Option<u64> {
    if k == 0 {
        return Some((n == 0) as u64);
    }
    binomial(n + k as u64 - 1, k as u64 - 1)
}

/// Number of monomials of degree `n` in `k` variables with every exponent positive.
pub fn positive_monomial_count(k: u32, n: u64) -> Option<u64> {
    if k == 0 {
        return Some((n == 0) as u64);
    }
    if n < k as u64 {
        return Some(0);
    }
    binomial(n - 1, k as u64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Minimum number of parts `2^u - 1` by dynamic programming.
    fn mu_exhaustive(limit: usize) -> Vec<u32> {
        let parts: Vec<usize> = (1..12).map(|u| (1usize << u) - 1).filter(|&p| p <= limit).collect();
        let mut best = vec![u32::MAX; limit + 1];
        best[0] = 0;
        for n in 1..=limit {
            for &p in &parts {
                if p <= n && best[n - p] != u32::MAX {
                    best[n] = best[n].min(best[n - p] + 1);
                }
            }
        }
        best
    }

    #[test]
    fn mu_matches_exhaustive_search() {
        let oracle = mu_exhaustive(1000);
        for (n, &want) in oracle.iter().enumerate() {
            assert_eq!(mu(n as u64), want, "n = {n}");
        }
    }

    #[test]
    fn mu_reference_values() {
        assert_eq!(mu(24), 4);
        assert_eq!(mu(53), 3);
        assert_eq!(mu(0), 0);
        assert_eq!(mu(5), 3);
        assert_eq!(mu(25), 3);
        assert_eq!(mu(19), 3);
    }

    #[test]
    fn mu_subadditive() {
        for n in 0..=200u64 {
            for a in 0..=n {
                assert!(mu(n) <= mu(a) + mu(n - a));
            }
        }
    }

    #[test]
    fn single_variable_spikes() {
        for n in 1..=60u64 {
            let spike = (n + 1).is_power_of_two();
            assert_eq!(mu(n) > 1, !spike, "n = {n}");
        }
    }

    #[test]
    fn alpha_zeta() {
        assert_eq!(alpha(58), 4);
        assert_eq!(zeta(58).unwrap(), 1);
        assert_eq!(zeta(24).unwrap(), 3);
        for t in 0..63 {
            assert_eq!(alpha(1 << t), 1);
        }
        assert!(zeta(0).is_err());
    }

    #[test]
    fn t_bound_values() {
        assert_eq!(t_bound(5, 53), 0);
        assert_eq!(t_bound(5, 24), 1);
        assert_eq!(t_bound(1, 0), 0);
        assert_eq!(t_bound(4, 3), 1);
    }

    #[test]
    fn lucas_parity_matches_pascal() {
        let mut row = vec![1u64];
        for a in 0..64u64 {
            for (i, c) in row.iter().enumerate() {
                assert_eq!(binomial_is_odd(a, i as u64), c % 2 == 1, "C({a},{i})");
            }
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = (row[i - 1] + row[i]) % 2;
            }
            row = next;
        }
    }

    #[test]
    fn counts() {
        assert_eq!(monomial_count(5, 24), Some(20475));
        assert_eq!(monomial_count(4, 10), Some(286));
        assert_eq!(positive_monomial_count(5, 24), Some(8855));
        assert_eq!(positive_monomial_count(3, 2), Some(0));
    }
}
