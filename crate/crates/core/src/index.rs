//! Enumeration of monomials and weight vectors in a fixed degree.

use std::ops::Range;

use rustc_hash::FxHashMap;

use crate::arith::{monomial_count, positive_monomial_count};
use crate::error::{invalid, Error, Result};
use crate::monomial::{Monomial, WeightVector, MAX_VARS};

/// Default ceiling on the number of columns an index may hold.
pub const DEFAULT_COLUMN_LIMIT: u64 = 1 << 31;

/// Which monomials of the degree an index covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Span {
    /// Every monomial of the degree.
    All,
    /// Only monomials with every exponent positive (`P_k^+`).
    Positive,
}

/// The column coordinate system for one `(k, n)` stratum: the monomials of
/// degree `n`, ascending in the admissibility order.
#[derive(Clone, Debug)]
pub struct DegreeIndex {
    k: usize,
    n: u64,
    span: Span,
    monomials: Vec<Monomial>,
    weights: Vec<u128>,
    position: FxHashMap<Monomial, u32>,
}

impl DegreeIndex {
    pub fn new(k: usize, n: u64, span: Span) -> Result<DegreeIndex> {
        DegreeIndex::with_limit(k, n, span, DEFAULT_COLUMN_LIMIT)
    }

    pub fn with_limit(k: usize, n: u64, span: Span, limit: u64) -> Result<DegreeIndex> {
        if k == 0 || k > MAX_VARS {
            return Err(invalid(format!("variable count {k} outside 1..={MAX_VARS}")));
        }
        if n >= 1 << 31 {
            return Err(invalid(format!("degree {n} too large")));
        }
        let count = match span {
            Span::All => monomial_count(k as u32, n),
            Span::Positive => positive_monomial_count(k as u32, n),
        };
        match count {
            Some(c) if c <= limit => {}
            _ => {
                return Err(Error::ResourceLimit(format!(
                    "degree {n} in {k} variables has more than {limit} monomials"
                )))
            }
        }
        let mut monomials = Vec::with_capacity(count.unwrap_or(0) as usize);
        let min = match span {
            Span::All => 0,
            Span::Positive => 1,
        };
        let mut exps = vec![0u32; k];
        compositions(&mut exps, 0, n as u32, min, &mut |e| {
            monomials.push(Monomial::new(e).expect("valid variable count"))
        });
        let mut keyed: Vec<(u128, Monomial)> =
            monomials.into_iter().map(|m| (m.packed_weight(), m)).collect();
        keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.exps().cmp(b.1.exps())));
        let weights = keyed.iter().map(|p| p.0).collect();
        let monomials: Vec<Monomial> = keyed.into_iter().map(|p| p.1).collect();
        let position = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (*m, i as u32))
            .collect();
        Ok(DegreeIndex { k, n, span, monomials, weights, position })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> u64 {
        self.n
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn monomial(&self, col: usize) -> Monomial {
        self.monomials[col]
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.position.get(m).map(|&i| i as usize)
    }

    /// Column range occupied by monomials of weight exactly `omega`.
    pub fn weight_range(&self, omega: &WeightVector) -> Range<usize> {
        let Some(key) = omega.packed() else {
            return 0..0;
        };
        let lo = self.weights.partition_point(|&w| w < key);
        let hi = self.weights.partition_point(|&w| w <= key);
        lo..hi
    }

    /// First column whose weight vector is at least `omega`.
    pub fn weight_start(&self, omega: &WeightVector) -> usize {
        match omega.packed() {
            Some(key) => self.weights.partition_point(|&w| w < key),
            None => self.len(),
        }
    }

    /// The distinct weight vectors present, with their column ranges, ascending.
    pub fn weight_blocks(&self) -> Vec<(WeightVector, Range<usize>)> {
        let mut out = Vec::new();
        let mut start = 0;
        while start < self.len() {
            let key = self.weights[start];
            let end = start + self.weights[start..].partition_point(|&w| w == key);
            out.push((self.monomials[start].weight_vector(), start..end));
            start = end;
        }
        out
    }
}

/// All monomials of degree `n` in `P_k`, ascending in the admissibility order.
pub fn enumerate_monomials(k: usize, n: u64) -> Result<DegreeIndex> {
    DegreeIndex::new(k, n, Span::All)
}

fn compositions(exps: &mut [u32], at: usize, rest: u32, min: u32, f: &mut impl FnMut(&[u32])) {
    let k = exps.len();
    if at + 1 == k {
        if rest >= min {
            exps[at] = rest;
            f(exps);
        }
        return;
    }
    let reserve = min * (k - at - 1) as u32;
    if rest < reserve + min {
        return;
    }
    for a in min..=rest - reserve {
        exps[at] = a;
        compositions(exps, at + 1, rest - a, min, f);
    }
}

/// All weight vectors of degree `n` with entries at most `k`, descending left-lex.
pub fn enumerate_weight_vectors(k: usize, n: u64) -> Vec<WeightVector> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    weights_rec(k as u64, n, &mut prefix, &mut out);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn weights_rec(k: u64, rest: u64, prefix: &mut Vec<u32>, out: &mut Vec<WeightVector>) {
    if rest == 0 {
        out.push(WeightVector::new(prefix.clone()));
        return;
    }
    let mut w = rest % 2;
    while w <= k.min(rest) {
        prefix.push(w as u32);
        weights_rec(k, (rest - w) / 2, prefix, out);
        prefix.pop();
        w += 2;
    }
}

/// Strictly increasing 1-based index tuples of length `r` in `1..=k`, lexicographic.
pub fn index_tuples(k: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    tuples_rec(k, r, 1, &mut cur, &mut out);
    out
}

fn tuples_rec(k: usize, r: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == r {
        out.push(cur.clone());
        return;
    }
    for j in from..=k {
        if k - j + 1 < r - cur.len() {
            break;
        }
        cur.push(j);
        tuples_rec(k, r, j + 1, cur, out);
        cur.pop();
    }
}
