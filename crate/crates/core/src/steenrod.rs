//! Action of the Steenrod squares on `P_k` through the Cartan formula.

use std::fmt;

use crate::arith::binomial_is_odd;
use crate::error::{invalid, Result};
use crate::index::{DegreeIndex, Span};
use crate::monomial::Monomial;

/// A homogeneous polynomial over `F_2`: a set of distinct monomials of one degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    k: usize,
    degree: u64,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(k: usize, degree: u64) -> Polynomial {
        Polynomial { k, degree, terms: Vec::new() }
    }

    pub fn from_monomial(m: Monomial) -> Polynomial {
        Polynomial { k: m.k(), degree: m.degree(), terms: vec![m] }
    }

    /// Sums monomials over `F_2`; repeated monomials cancel in pairs.
    pub fn from_terms(k: usize, degree: u64, terms: impl IntoIterator<Item = Monomial>) -> Result<Polynomial> {
        let mut terms: Vec<Monomial> = terms.into_iter().collect();
        for t in &terms {
            if t.k() != k || t.degree() != degree {
                return Err(invalid(format!("term {t} is not of degree {degree} in P_{k}")));
            }
        }
        cancel_pairs(&mut terms);
        Ok(Polynomial { k, degree, terms })
    }

    pub(crate) fn from_raw(k: usize, degree: u64, mut terms: Vec<Monomial>) -> Polynomial {
        cancel_pairs(&mut terms);
        Polynomial { k, degree, terms }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// Terms in ascending admissibility order.
    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest term in the admissibility order.
    pub fn leading_term(&self) -> Option<Monomial> {
        self.terms.last().copied()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!((self.k, self.degree), (other.k, other.degree), "adding polynomials of different strata");
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Polynomial::from_raw(self.k, self.degree, terms)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.k, other.k);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        Polynomial::from_raw(self.k, self.degree + other.degree, terms)
    }

    /// Image under the Kameko map `x_1 ... x_k y^2 -> y`, other monomials to zero.
    pub fn kameko_down(&self) -> Polynomial {
        let degree = if self.degree >= self.k as u64 && (self.degree - self.k as u64) % 2 == 0 {
            (self.degree - self.k as u64) / 2
        } else {
            0
        };
        let terms = self.terms.iter().filter_map(|m| m.kameko_down()).collect();
        Polynomial::from_raw(self.k, degree, terms)
    }
}

fn cancel_pairs(terms: &mut Vec<Monomial>) {
    terms.sort_unstable();
    let mut out = Vec::with_capacity(terms.len());
    let mut i = 0;
    while i < terms.len() {
        let mut j = i;
        while j < terms.len() && terms[j] == terms[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(terms[i]);
        }
        i = j;
    }
    *terms = out;
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `Sq^i(x^a) = C(a, i) x^{a+i}`; returns the new exponent when the coefficient is odd.
#[inline]
pub fn sq_one_variable(a: u32, i: u32) -> Option<u32> {
    binomial_is_odd(a as u64, i as u64).then_some(a + i)
}

/// Calls `emit` once for every monomial of `Sq^i(m)`. Distinct compositions of
/// `i` give distinct exponent vectors, so no two emitted monomials coincide.
pub fn sq_monomial_each(i: u32, m: &Monomial, mut emit: impl FnMut(Monomial)) {
    let exps = m.exps();
    let k = exps.len();
    let mut suffix = [0u64; crate::monomial::MAX_VARS + 1];
    for t in (0..k).rev() {
        suffix[t] = suffix[t + 1] + exps[t] as u64;
    }
    if i as u64 > suffix[0] {
        return;
    }
    let mut out = *m;
    cartan_rec(exps, &suffix, 0, i, &mut out, &mut emit);
}

fn cartan_rec(
    exps: &[u32],
    suffix: &[u64],
    t: usize,
    rest: u32,
    out: &mut Monomial,
    emit: &mut impl FnMut(Monomial),
) {
    let k = exps.len();
    if t + 1 == k {
        // the last variable takes whatever is left
        if binomial_is_odd(exps[t] as u64, rest as u64) {
            out.exps_mut()[t] = exps[t] + rest;
            emit(*out);
        }
        return;
    }
    let a = exps[t];
    let later = suffix[t + 1];
    // walk the submasks of `a` not exceeding `rest`
    let mut s = a & mask_up_to(rest);
    loop {
        if s <= rest && (rest - s) as u64 <= later {
            out.exps_mut()[t] = a + s;
            cartan_rec(exps, suffix, t + 1, rest - s, out, emit);
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & a;
    }
    out.exps_mut()[t] = a;
}

#[inline]
fn mask_up_to(v: u32) -> u32 {
    if v == 0 {
        0
    } else {
        u32::MAX >> v.leading_zeros()
    }
}

/// `Sq^i` applied to a polynomial.
pub fn sq(i: u32, f: &Polynomial) -> Polynomial {
    let mut terms = Vec::new();
    for m in f.terms() {
        sq_monomial_each(i, m, |t| terms.push(t));
    }
    Polynomial::from_raw(f.k(), f.degree() + i as u64, terms)
}

/// `Sq^i` applied to one monomial.
pub fn sq_monomial(i: u32, m: &Monomial) -> Polynomial {
    let mut terms = Vec::new();
    sq_monomial_each(i, m, |t| terms.push(t));
    Polynomial::from_raw(m.k(), m.degree() + i as u64, terms)
}

/// One element of the spanning set of the hit subspace: `Sq^{2^u}(source)`.
#[derive(Clone, Debug)]
pub struct HitGenerator {
    pub u: u32,
    pub source: Monomial,
    pub image: Polynomial,
}

/// Streams `Sq^{2^u}(m)` for every `u` with `2^u <= n` and every monomial `m`
/// of degree `n - 2^u`, ordered by `u` and then by `m`.
pub struct HitGeneratorStream {
    k: usize,
    n: u64,
    span: Span,
    u: u32,
    sources: Option<DegreeIndex>,
    pos: usize,
    done: bool,
}

impl HitGeneratorStream {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> u64 {
        self.n
    }

    pub fn is_exhausted(&self) -> bool {
        self.done
    }

    /// Total number of generators the stream yields.
    pub fn expected_len(&self) -> u64 {
        let mut total = 0;
        let mut u = 0;
        while 1u64 << u <= self.n {
            let d = self.n - (1 << u);
            total += match self.span {
                Span::All => crate::arith::monomial_count(self.k as u32, d),
                Span::Positive => crate::arith::positive_monomial_count(self.k as u32, d),
            }
            .unwrap_or(u64::MAX);
            u += 1;
        }
        total
    }

    fn load(&mut self) -> Result<()> {
        while !self.done {
            if 1u64 << self.u > self.n {
                self.done = true;
                self.sources = None;
                return Ok(());
            }
            let idx = DegreeIndex::new(self.k, self.n - (1 << self.u), self.span)?;
            if idx.is_empty() {
                self.u += 1;
                continue;
            }
            self.sources = Some(idx);
            self.pos = 0;
            return Ok(());
        }
        Ok(())
    }
}

impl Iterator for HitGeneratorStream {
    type Item = HitGenerator;

    fn next(&mut self) -> Option<HitGenerator> {
        loop {
            if self.done {
                return None;
            }
            if let Some(idx) = &self.sources {
                if self.pos < idx.len() {
                    let source = idx.monomial(self.pos);
                    self.pos += 1;
                    let image = sq_monomial(1 << self.u, &source);
                    return Some(HitGenerator { u: self.u, source, image });
                }
                self.u += 1;
            }
            self.load().ok()?;
        }
    }
}

/// Generators of the hit subspace of `(P_k)_n`.
pub fn hit_generators(k: usize, n: u64) -> Result<HitGeneratorStream> {
    hit_generators_in(k, n, Span::All)
}

/// Generators restricted to sources in `span`. For [`Span::Positive`] they span
/// the hit elements of `P_k^+`, since `P_k^+` is an `A`-submodule.
pub fn hit_generators_in(k: usize, n: u64, span: Span) -> Result<HitGeneratorStream> {
    if n == 0 {
        return Err(invalid("the hit subspace is only defined in positive degree"));
    }
    let mut s = HitGeneratorStream { k, n, span, u: 0, sources: None, pos: 0, done: false };
    s.load()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e).unwrap()
    }

    fn p(k: usize, ts: &[&[u32]]) -> Polynomial {
        let terms: Vec<Monomial> = ts.iter().map(|e| m(e)).collect();
        let d = terms[0].degree();
        Polynomial::from_terms(k, d, terms).unwrap()
    }

    /// `C(a, i) mod 2` from the 2-adic valuation of factorials.
    fn binom_parity_oracle(a: u64, i: u64) -> bool {
        if i > a {
            return false;
        }
        let v = |n: u64| -> u64 { (1..).map(|s| n >> s).take_while(|&q| q > 0).sum() };
        v(a) == v(i) + v(a - i)
    }

    /// Cartan expansion by brute force over all compositions of `i`.
    fn sq_oracle(i: u32, x: &Monomial) -> Polynomial {
        fn rec(e: &[u32], t: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if t == e.len() {
                if rest == 0 {
                    out.push(Monomial::new(cur).unwrap());
                }
                return;
            }
            for s in 0..=rest {
                if binom_parity_oracle(e[t] as u64, s as u64) {
                    cur.push(e[t] + s);
                    rec(e, t + 1, rest - s, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(x.exps(), 0, i, &mut Vec::new(), &mut out);
        Polynomial::from_raw(x.k(), x.degree() + i as u64, out)
    }

    #[test]
    fn one_variable_rule() {
        assert_eq!(sq_one_variable(1, 1), Some(2));
        assert_eq!(sq_one_variable(2, 1), None);
        assert_eq!(sq_one_variable(5, 2), None);
        assert_eq!(sq_one_variable(5, 4), Some(9));
        for a in 0..70u32 {
            for i in 0..70u32 {
                assert_eq!(sq_one_variable(a, i).is_some(), binom_parity_oracle(a as u64, i as u64));
            }
        }
    }

    #[test]
    fn cartan_examples() {
        assert_eq!(sq(1, &p(2, &[&[1, 1]])), p(2, &[&[2, 1], &[1, 2]]));
        assert_eq!(sq(2, &p(2, &[&[1, 2]])), p(2, &[&[1, 4]]));
        assert_eq!(sq_oracle(2, &m(&[1, 2])), p(2, &[&[1, 4]]));
    }

    #[test]
    fn cartan_matches_oracle() {
        let idx = DegreeIndex::new(3, 7, Span::All).unwrap();
        for x in idx.monomials() {
            for i in 0..=9 {
                assert_eq!(sq_monomial(i, x), sq_oracle(i, x), "Sq^{i}({x})");
            }
        }
    }

    #[test]
    fn hit_stream_small_cases() {
        let gens: Vec<_> = hit_generators(1, 2).unwrap().collect();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[0].image, p(1, &[&[2]]));
        assert!(gens[1].image.is_zero());

        let gens: Vec<_> = hit_generators(2, 2).unwrap().collect();
        let nonzero: Vec<_> = gens.iter().filter(|g| !g.image.is_zero()).map(|g| g.image.clone()).collect();
        assert_eq!(nonzero, vec![p(2, &[&[0, 2]]), p(2, &[&[2, 0]])]);
    }

    #[test]
    fn hit_stream_length() {
        let s = hit_generators(5, 24).unwrap();
        assert_eq!(s.expected_len(), 17550 + 14950 + 10626 + 4845 + 495);
        let s = hit_generators(3, 9).unwrap();
        let want = s.expected_len();
        assert_eq!(s.count() as u64, want);
    }

    fn small_monomial(k: usize) -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0u32..9, k).prop_map(|e| Monomial::new(&e).unwrap())
    }

    fn small_poly(k: usize, degree: u64) -> impl Strategy<Value = Polynomial> {
        let idx = DegreeIndex::new(k, degree, Span::All).unwrap();
        let ms = idx.monomials().to_vec();
        proptest::collection::vec(proptest::sample::select(ms), 0..6)
            .prop_map(move |ts| Polynomial::from_terms(k, degree, ts).unwrap())
    }

    proptest! {
        #[test]
        fn sq_zero_is_identity(f in small_poly(3, 6)) {
            prop_assert_eq!(sq(0, &f), f);
        }

        #[test]
        fn sq1_sq1_vanishes(f in small_poly(4, 7)) {
            prop_assert!(sq(1, &sq(1, &f)).is_zero());
        }

        #[test]
        fn top_square_is_squaring(x in small_monomial(3)) {
            let f = Polynomial::from_monomial(x);
            prop_assert_eq!(sq(x.degree() as u32, &f), f.mul(&f));
            prop_assert!(sq(x.degree() as u32 + 1, &f).is_zero());
        }

        #[test]
        fn top_square_on_sums(f in small_poly(2, 5)) {
            prop_assert_eq!(sq(5, &f), f.mul(&f));
        }

        #[test]
        fn cartan_bilinearity(f in small_poly(3, 3), g in small_poly(3, 4), i in 0u32..8) {
            let lhs = sq(i, &f.mul(&g));
            let mut rhs = Polynomial::zero(3, 7 + i as u64);
            for a in 0..=i {
                rhs = rhs.add(&sq(a, &f).mul(&sq(i - a, &g)));
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn degree_homogeneity(x in small_monomial(4), i in 0u32..20) {
            for t in sq_monomial(i, &x).terms() {
                prop_assert_eq!(t.degree(), x.degree() + i as u64);
            }
        }

        #[test]
        fn kameko_commutes_with_squares(y in small_monomial(4), i in 0u32..10) {
            let x = Polynomial::from_monomial(y.kameko_up());
            prop_assert_eq!(sq(2 * i, &x).kameko_down(), sq(i, &Polynomial::from_monomial(y)));
            prop_assert!(sq(2 * i + 1, &x).kameko_down().is_zero());
        }
    }
}
