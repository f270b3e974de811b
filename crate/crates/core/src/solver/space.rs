use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::arith::mu;
use crate::error::{invalid, Error, Result};
use crate::gf2::{words_for, BitVector};
use crate::index::index_tuples;
use crate::monomial::{Monomial, MAX_VARS};
use crate::steenrod::Polynomial;

use super::positive::PositivePart;

/// Supplies the positive part for `(r, n)`, e.g. from a cache.
pub trait PartSource {
    fn part(&mut self, r: usize, n: u64) -> Result<Arc<PositivePart>>;
}

/// Computes every part from scratch.
#[derive(Default)]
pub struct Compute;

impl PartSource for Compute {
    fn part(&mut self, r: usize, n: u64) -> Result<Arc<PositivePart>> {
        Ok(Arc::new(PositivePart::compute(r, n)?))
    }
}

impl<F: FnMut(usize, u64) -> Result<Arc<PositivePart>>> PartSource for F {
    fn part(&mut self, r: usize, n: u64) -> Result<Arc<PositivePart>> {
        self(r, n)
    }
}

/// `(F_2 ⊗_A P_k)_n` with its admissible basis.
///
/// Both the hit subspace and the order split along the support of a monomial:
/// each `A`-submodule spanned by monomials with a fixed set of nonzero
/// exponents is a copy of `P_r^+` under `f_J`. The space therefore keeps one
/// [`PositivePart`] per `r` and embeds it along every `J`.
#[derive(Clone, Debug)]
pub struct CohitSpace {
    k: usize,
    n: u64,
    parts: Vec<Option<Arc<PositivePart>>>,
    basis: Vec<Monomial>,
    coord: FxHashMap<Monomial, u32>,
}

impl CohitSpace {
    pub fn compute(k: usize, n: u64) -> Result<CohitSpace> {
        CohitSpace::build(k, n, &mut Compute)
    }

    pub fn build(k: usize, n: u64, source: &mut impl PartSource) -> Result<CohitSpace> {
        if k == 0 || k > MAX_VARS {
            return Err(invalid(format!("variable count {k} outside 1..={MAX_VARS}")));
        }
        let mut parts = vec![None; k + 1];
        let mut basis = Vec::new();
        if n == 0 {
            basis.push(Monomial::one(k));
        } else {
            let m = mu(n) as usize;
            for r in m.max(1)..=k.min(n as usize) {
                let part = source.part(r, n)?;
                if part.index().k() != r || part.index().degree() != n {
                    return Err(Error::Internal(format!("part source returned the wrong stratum for ({r}, {n})")));
                }
                if !part.is_complete() {
                    return Err(Error::Precondition(format!("part ({r}, {n}) is truncated")));
                }
                for j in index_tuples(k, r) {
                    for a in part.admissible() {
                        basis.push(a.inject_subset(&j, k)?);
                    }
                }
                parts[r] = Some(part);
            }
        }
        basis.sort_unstable();
        let coord = basis.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
        Ok(CohitSpace { k, n, parts, basis, coord })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> u64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Admissible monomials, ascending.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// The positive part for `r` variables, if it can contribute.
    pub fn part(&self, r: usize) -> Option<&Arc<PositivePart>> {
        self.parts.get(r).and_then(|p| p.as_ref())
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.coord.get(m).map(|&i| i as usize)
    }

    /// Coordinates of the class of `f` in the admissible basis.
    pub fn reduce(&self, f: &Polynomial) -> Result<BitVector> {
        if f.k() != self.k || f.degree() != self.n {
            return Err(invalid(format!(
                "polynomial of degree {} in P_{} reduced in degree {} of P_{}",
                f.degree(),
                f.k(),
                self.n,
                self.k
            )));
        }
        let mut out = BitVector::zeros(self.dim());
        if self.n == 0 {
            if !f.is_zero() {
                out.set(0, true);
            }
            return Ok(out);
        }
        let mut by_support: FxHashMap<u32, Vec<Monomial>> = FxHashMap::default();
        for t in f.terms() {
            by_support.entry(t.support()).or_default().push(*t);
        }
        let mut supports: Vec<_> = by_support.into_iter().collect();
        supports.sort_unstable_by_key(|s| s.0);
        for (support, terms) in supports {
            let r = support.count_ones() as usize;
            let Some(part) = self.part(r) else {
                continue; // every monomial of this support is hit
            };
            let idx = part.index();
            let mut words = vec![0u64; words_for(idx.len())];
            for t in &terms {
                let c = idx
                    .position(&t.compress(support))
                    .ok_or_else(|| Error::Internal(format!("{t} missing from the positive index")))?;
                words[c / 64] ^= 1 << (c % 64);
            }
            part.reduce_words(&mut words);
            let rem = BitVector::from_words(idx.len(), words)?;
            for c in rem.ones() {
                let m = idx.monomial(c).expand(support, self.k);
                let i = self
                    .position(&m)
                    .ok_or_else(|| Error::Internal(format!("reduced class contains inadmissible {m}")))?;
                out.flip(i);
            }
        }
        Ok(out)
    }

    pub fn is_hit(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }

    pub fn positive_basis(&self) -> impl Iterator<Item = &Monomial> {
        self.basis.iter().filter(|m| m.is_positive())
    }

    pub fn zero_basis(&self) -> impl Iterator<Item = &Monomial> {
        self.basis.iter().filter(|m| !m.is_positive())
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::index::{DegreeIndex, Span};
    use crate::solver::DirectSolution;
    use crate::steenrod::{hit_generators, sq_monomial};

    #[test]
    fn degree_zero_is_one_dimensional() {
        let s = CohitSpace::compute(3, 0).unwrap();
        assert_eq!(s.basis(), &[Monomial::one(3)]);
    }

    #[test]
    fn one_variable_cohits_sit_at_spikes() {
        for n in 0..=64u64 {
            let d = CohitSpace::compute(1, n).unwrap().dim();
            assert_eq!(d, usize::from((n + 1).is_power_of_two()), "n = {n}");
        }
    }

    #[test]
    fn matches_whole_space_elimination() {
        for (k, top) in [(1, 20), (2, 20), (3, 20), (4, 16), (5, 10)] {
            for n in 1..=top {
                let split = CohitSpace::compute(k, n).unwrap();
                let direct = DirectSolution::compute(k, n).unwrap();
                assert_eq!(split.basis(), direct.admissible().as_slice(), "(k, n) = ({k}, {n})");
            }
        }
    }

    #[test]
    fn reduction_agrees_with_whole_space_remainder() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (k, n) in [(3, 9), (4, 10), (4, 7)] {
            let split = CohitSpace::compute(k, n).unwrap();
            let direct = DirectSolution::compute(k, n).unwrap();
            let index = DegreeIndex::new(k, n, Span::All).unwrap();
            for _ in 0..40 {
                let terms: Vec<Monomial> =
                    (0..rng.gen_range(1..12)).map(|_| index.monomial(rng.gen_range(0..index.len()))).collect();
                let f = Polynomial::from_terms(k, n, terms).unwrap();
                let v = BitVector::from_indices(index.len(), f.terms().iter().map(|t| index.position(t).unwrap()));
                let rem = direct.hit.reduce_vector(&v);
                let expect = BitVector::from_indices(
                    split.dim(),
                    rem.ones().map(|c| split.position(&index.monomial(c)).unwrap()),
                );
                assert_eq!(split.reduce(&f).unwrap(), expect);
            }
        }
    }

    #[test]
    fn hit_elements_reduce_to_zero() {
        let s = CohitSpace::compute(4, 13).unwrap();
        for g in hit_generators(4, 13).unwrap().step_by(7) {
            assert!(s.is_hit(&g.image).unwrap());
        }
        let x = Monomial::new(&[1, 2, 3, 0]).unwrap();
        assert!(s.is_hit(&sq_monomial(7, &x)).unwrap());
    }

    #[test]
    fn admissible_monomials_reduce_to_themselves() {
        let s = CohitSpace::compute(4, 12).unwrap();
        for (i, m) in s.basis().iter().enumerate() {
            assert_eq!(s.reduce(&Polynomial::from_monomial(*m)).unwrap(), BitVector::unit(s.dim(), i));
        }
    }

    #[test]
    fn rejects_foreign_polynomials() {
        let s = CohitSpace::compute(3, 5).unwrap();
        let f = Polynomial::from_monomial(Monomial::new(&[1, 1, 1, 1]).unwrap());
        assert!(s.reduce(&f).is_err());
    }
}
