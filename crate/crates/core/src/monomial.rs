//! Monomials in `P_k = F_2[x_1, ..., x_k]`, their weight vectors and the
//! admissibility order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 10;

/// A monomial `x_1^{a_1} ... x_k^{a_k}`.
///
/// Unused exponent slots beyond `k` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    k: u8,
    exps: [u32; MAX_VARS],
}

impl Monomial {
    pub fn new(exps: &[u32]) -> Result<Monomial> {
        if exps.is_empty() || exps.len() > MAX_VARS {
            return Err(invalid(format!(
                "variable count {} outside 1..={MAX_VARS}",
                exps.len()
            )));
        }
        let mut a = [0u32; MAX_VARS];
        a[..exps.len()].copy_from_slice(exps);
        Ok(Monomial { k: exps.len() as u8, exps: a })
    }

    /// The unit monomial of `P_k`.
    pub fn one(k: usize) -> Monomial {
        assert!((1..=MAX_VARS).contains(&k));
        Monomial { k: k as u8, exps: [0; MAX_VARS] }
    }

    /// The variable `x_i` (1-based) in `P_k`.
    pub fn var(k: usize, i: usize) -> Monomial {
        assert!((1..=k).contains(&i));
        let mut m = Monomial::one(k);
        m.exps[i - 1] = 1;
        m
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn exps(&self) -> &[u32] {
        &self.exps[..self.k as usize]
    }

    #[inline]
    pub(crate) fn exps_mut(&mut self) -> &mut [u32] {
        &mut self.exps[..self.k as usize]
    }

    /// Exponent of `x_j`, 1-based.
    pub fn exponent(&self, j: usize) -> u32 {
        self.exps()[j - 1]
    }

    #[inline]
    pub fn degree(&self) -> u64 {
        self.exps().iter().map(|&a| a as u64).sum()
    }

    /// True iff every exponent is positive, i.e. the monomial lies in `P_k^+`.
    #[inline]
    pub fn is_positive(&self) -> bool {
        self.exps().iter().all(|&a| a > 0)
    }

    /// Bit mask of the variables with nonzero exponent (bit `j - 1` for `x_j`).
    #[inline]
    pub fn support(&self) -> u32 {
        self.exps()
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .fold(0, |m, (j, _)| m | 1 << j)
    }

    pub fn weight_vector(&self) -> WeightVector {
        let mut entries: Vec<u32> = (0..32)
            .map(|b| self.exps().iter().map(|&a| (a >> b) & 1).sum())
            .collect();
        while entries.last() == Some(&0) {
            entries.pop();
        }
        WeightVector { entries }
    }

    /// Weight vector packed into nibbles, most significant nibble holding `omega_1`.
    /// Comparing packed values agrees with left-lexicographic comparison.
    #[inline]
    pub(crate) fn packed_weight(&self) -> u128 {
        let mut key = 0u128;
        for b in 0..32 {
            let w: u32 = self.exps().iter().map(|&a| (a >> b) & 1).sum();
            key |= (w as u128) << ((31 - b) * 4);
        }
        key
    }

    /// The admissibility order: weight vector first, then exponent tuple,
    /// both left-lexicographic. Monomials of different degree or variable
    /// count are ordered by `(k, degree)` first so that this is a total order.
    pub fn order_cmp(&self, other: &Monomial) -> Ordering {
        self.k
            .cmp(&other.k)
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| self.packed_weight().cmp(&other.packed_weight()))
            .then_with(|| self.exps().cmp(other.exps()))
    }

    /// `y` if `self = x_1 ... x_k y^2`, otherwise `None`.
    pub fn kameko_down(&self) -> Option<Monomial> {
        if self.exps().iter().any(|&a| a % 2 == 0) {
            return None;
        }
        let mut y = *self;
        for a in y.exps_mut() {
            *a = (*a - 1) / 2;
        }
        Some(y)
    }

    /// `x_1 ... x_k u^2`.
    pub fn kameko_up(&self) -> Monomial {
        let mut x = *self;
        for a in x.exps_mut() {
            *a = 2 * *a + 1;
        }
        x
    }

    /// The algebra map `P_{k-1} -> P_k` that skips variable `i` (1-based).
    pub fn inject_variable(&self, i: usize) -> Result<Monomial> {
        let k = self.k() + 1;
        if k > MAX_VARS || !(1..=k).contains(&i) {
            return Err(invalid(format!("index {i} out of range for P_{k}")));
        }
        let mut e = [0u32; MAX_VARS];
        e[..i - 1].copy_from_slice(&self.exps()[..i - 1]);
        e[i..k].copy_from_slice(&self.exps()[i - 1..]);
        Ok(Monomial { k: k as u8, exps: e })
    }

    /// The algebra map `P_r -> P_k`, `x_t -> x_{j_t}` for a strictly increasing
    /// 1-based index tuple `J` of length `r`.
    pub fn inject_subset(&self, indices: &[usize], k: usize) -> Result<Monomial> {
        if indices.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), found: indices.len() });
        }
        if k > MAX_VARS || k == 0 {
            return Err(invalid(format!("variable count {k} outside 1..={MAX_VARS}")));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("index tuple must be strictly increasing"));
        }
        if indices.iter().any(|&j| j == 0 || j > k) {
            return Err(invalid(format!("index tuple out of range 1..={k}")));
        }
        let mut e = [0u32; MAX_VARS];
        for (t, &j) in indices.iter().enumerate() {
            e[j - 1] = self.exps[t];
        }
        Ok(Monomial { k: k as u8, exps: e })
    }

    /// Drops the variables outside `support` (a bit mask), keeping order.
    pub(crate) fn compress(&self, support: u32) -> Monomial {
        let mut e = [0u32; MAX_VARS];
        let mut r = 0;
        for j in 0..self.k() {
            if support >> j & 1 == 1 {
                e[r] = self.exps[j];
                r += 1;
            }
        }
        Monomial { k: r as u8, exps: e }
    }

    /// Inverse of [`Monomial::compress`].
    pub(crate) fn expand(&self, support: u32, k: usize) -> Monomial {
        let mut e = [0u32; MAX_VARS];
        let mut t = 0;
        for (j, slot) in e.iter_mut().enumerate().take(k) {
            if support >> j & 1 == 1 {
                *slot = self.exps[t];
                t += 1;
            }
        }
        Monomial { k: k as u8, exps: e }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.k, other.k);
        let mut m = *self;
        for (a, b) in m.exps_mut().iter_mut().zip(other.exps()) {
            *a += b;
        }
        m
    }
}

/// Compares two monomials of equal degree in the same `P_k` under the admissibility order.
pub fn compare_monomials(x: &Monomial, y: &Monomial) -> Result<Ordering> {
    if x.k != y.k {
        return Err(invalid(format!("variable counts differ: {} vs {}", x.k, y.k)));
    }
    if x.degree() != y.degree() {
        return Err(invalid(format!("degrees differ: {} vs {}", x.degree(), y.degree())));
    }
    Ok(x.order_cmp(y))
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_cmp(other)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for (j, &a) in self.exps().iter().enumerate() {
            match a {
                0 => continue,
                1 => write!(f, "x{}", j + 1)?,
                _ => write!(f, "x{}^{}", j + 1, a)?,
            }
            any = true;
        }
        if !any {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.exps().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        Monomial::new(&v).map_err(serde::de::Error::custom)
    }
}

/// The sequence `(omega_1, omega_2, ...)` counting, for each binary digit,
/// how many exponents have that digit set. Trailing zeros are trimmed, so the
/// derived ordering is the left-lexicographic one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector {
    entries: Vec<u32>,
}

impl WeightVector {
    pub fn new(mut entries: Vec<u32>) -> WeightVector {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        WeightVector { entries }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// `sum_i 2^{i-1} omega_i`.
    pub fn degree(&self) -> u64 {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, &w)| (w as u64) << i)
            .sum()
    }

    /// Entry `omega_i` for 1-based `i`, zero past the end.
    pub fn get(&self, i: usize) -> u32 {
        self.entries.get(i.wrapping_sub(1)).copied().unwrap_or(0)
    }

    pub(crate) fn packed(&self) -> Option<u128> {
        if self.entries.len() > 32 || self.entries.iter().any(|&w| w > 15) {
            return None;
        }
        Some(
            self.entries
                .iter()
                .enumerate()
                .fold(0u128, |acc, (b, &w)| acc | (w as u128) << ((31 - b) * 4)),
        )
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<u32>().map_err(|e| invalid(format!("bad weight entry {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightVector::new(entries))
    }
}
