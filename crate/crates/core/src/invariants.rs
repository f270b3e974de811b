//! The action of `GL_k(F_2)` on the cohits and its fixed points.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gf2::{BitMatrix, BitVector, EchelonBasis};
use crate::monomial::Monomial;
use crate::solver::CohitSpace;
use crate::steenrod::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Swaps `x_i` and `x_j` (1-based).
    Transposition { i: usize, j: usize },
    /// `x_1 ↦ x_1 + x_2`, other variables fixed.
    Transvection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupGenerator {
    pub k: usize,
    pub kind: GeneratorKind,
}

impl GroupGenerator {
    pub fn transposition(k: usize, i: usize, j: usize) -> Result<GroupGenerator> {
        if i == j || i == 0 || j == 0 || i > k || j > k {
            return Err(invalid(format!("transposition ({i} {j}) outside 1..={k}")));
        }
        Ok(GroupGenerator { k, kind: GeneratorKind::Transposition { i: i.min(j), j: i.max(j) } })
    }

    pub fn transvection(k: usize) -> Result<GroupGenerator> {
        if k < 2 {
            return Err(invalid("a transvection needs two variables"));
        }
        Ok(GroupGenerator { k, kind: GeneratorKind::Transvection })
    }
}

/// Adjacent transpositions and the transvection. Empty for `k = 1`.
pub fn standard_generators(k: usize) -> Vec<GroupGenerator> {
    if k < 2 {
        return Vec::new();
    }
    let mut out: Vec<_> = (1..k).map(|i| GroupGenerator::transposition(k, i, i + 1).unwrap()).collect();
    out.push(GroupGenerator::transvection(k).unwrap());
    out
}

/// Every transposition and the transvection.
pub fn all_transposition_generators(k: usize) -> Vec<GroupGenerator> {
    if k < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 1..=k {
        for j in i + 1..=k {
            out.push(GroupGenerator::transposition(k, i, j).unwrap());
        }
    }
    out.push(GroupGenerator::transvection(k).unwrap());
    out
}

/// Applies the substitution of `g` to `f`.
///
/// `(x_1 + x_2)^a` expands over the submasks `j` of `a`, the odd binomial coefficients.
pub fn substitute(g: &GroupGenerator, f: &Polynomial) -> Result<Polynomial> {
    if g.k != f.k() {
        return Err(invalid(format!("generator for k = {} applied in P_{}", g.k, f.k())));
    }
    let mut terms: Vec<Monomial> = Vec::with_capacity(f.terms().len());
    for m in f.terms() {
        match g.kind {
            GeneratorKind::Transposition { i, j } => {
                let mut y = *m;
                y.exps_mut().swap(i - 1, j - 1);
                terms.push(y);
            }
            GeneratorKind::Transvection => {
                let a = m.exps()[0];
                let mut sub = a;
                loop {
                    let mut y = *m;
                    y.exps_mut()[0] = a - sub;
                    y.exps_mut()[1] += sub;
                    terms.push(y);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & a;
                }
            }
        }
    }
    Polynomial::from_terms(f.k(), f.degree(), terms)
}

/// Matrix of `g` on the admissible basis: column `j` holds the coordinates of the image of basis element `j`.
pub fn induced_matrix(g: &GroupGenerator, space: &CohitSpace) -> Result<BitMatrix> {
    if g.k != space.k() {
        return Err(invalid("generator and space disagree on k"));
    }
    let columns = space
        .basis()
        .iter()
        .map(|m| space.reduce(&substitute(g, &Polynomial::from_monomial(*m))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(BitMatrix::from_columns(space.dim(), &columns))
}

/// The generator matrices on one degree of the cohits.
#[derive(Clone, Debug)]
pub struct QuotientAction {
    pub generators: Vec<GroupGenerator>,
    pub matrices: Vec<BitMatrix>,
    dim: usize,
}

impl QuotientAction {
    pub fn new(space: &CohitSpace, generators: Vec<GroupGenerator>) -> Result<QuotientAction> {
        let matrices = generators.iter().map(|g| induced_matrix(g, space)).collect::<Result<Vec<_>>>()?;
        for (g, m) in generators.iter().zip(&matrices) {
            if !m.is_invertible() {
                return Err(Error::Internal(format!("{g:?} acts singularly in degree {}", space.degree())));
            }
        }
        Ok(QuotientAction { generators, matrices, dim: space.dim() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Common fixed vectors of all generators, which are the fixed vectors of the group.
    pub fn invariants(&self) -> Vec<BitVector> {
        let mut relations = EchelonBasis::new(self.dim);
        for m in &self.matrices {
            let moved = m.add(&BitMatrix::identity(self.dim));
            for r in moved.rows() {
                relations.insert_row(r.clone()).expect("square matrices");
            }
        }
        crate::gf2::nullspace_of(&relations)
    }

    /// Product of the generator matrices in `word`, applied right to left.
    pub fn word_matrix(&self, word: &[usize]) -> BitMatrix {
        let mut acc = BitMatrix::identity(self.dim);
        for &w in word {
            acc = acc.mul(&self.matrices[w]);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub k: usize,
    pub n: u64,
    pub quotient_dim: usize,
    pub invariant_dim: usize,
    /// Each invariant as the admissible monomials of its representative.
    pub invariants: Vec<Vec<Monomial>>,
}

/// `dim (F_2 ⊗_A P_k)_n^{GL_k}`.
pub fn invariant_dimension(space: &CohitSpace) -> Result<InvariantReport> {
    let action = QuotientAction::new(space, standard_generators(space.k()))?;
    let inv = action.invariants();
    Ok(InvariantReport {
        k: space.k(),
        n: space.degree(),
        quotient_dim: space.dim(),
        invariant_dim: inv.len(),
        invariants: inv.iter().map(|v| v.ones().map(|i| space.basis()[i]).collect()).collect(),
    })
}

/// Reference dimension of `Ext_A^{k,k+n}(F_2, F_2)` supplied from outside.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtData {
    pub k: usize,
    pub n: u64,
    pub ext_dim: u64,
    pub source: String,
}

impl ExtData {
    /// Reads one record or an array of records and keeps the one for `(k, n)`.
    pub fn load(path: &Path, k: usize, n: u64) -> Result<Option<ExtData>> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let records: Vec<ExtData> = match value {
            serde_json::Value::Array(_) => serde_json::from_value(value)?,
            _ => vec![serde_json::from_value(value)?],
        };
        Ok(records.into_iter().find(|r| r.k == k && r.n == n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferVerdict {
    /// Dimensions are equal.
    ConsistentWithIsomorphism,
    /// The domain is larger, so the transfer could be onto but not injective.
    ConsistentWithEpimorphism,
    /// The domain is smaller than the target.
    EpimorphismImpossible,
    /// No reference data was supplied.
    OneSided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferReport {
    pub k: usize,
    pub n: u64,
    pub invariant_dim: usize,
    pub ext_dim: Option<u64>,
    pub source: Option<String>,
    pub verdict: TransferVerdict,
}

/// Compares the invariants with an Ext dimension. The domain of the transfer
/// is dual to the invariants, so an onto transfer needs `invariant_dim >= ext_dim`.
pub fn transfer_report(report: &InvariantReport, ext: Option<&ExtData>) -> Result<TransferReport> {
    if let Some(e) = ext {
        if (e.k, e.n) != (report.k, report.n) {
            return Err(invalid(format!("Ext data is for ({}, {}), not ({}, {})", e.k, e.n, report.k, report.n)));
        }
    }
    let verdict = match ext.map(|e| e.ext_dim) {
        None => TransferVerdict::OneSided,
        Some(e) if e == report.invariant_dim as u64 => TransferVerdict::ConsistentWithIsomorphism,
        Some(e) if e < report.invariant_dim as u64 => TransferVerdict::ConsistentWithEpimorphism,
        Some(_) => TransferVerdict::EpimorphismImpossible,
    };
    Ok(TransferReport {
        k: report.k,
        n: report.n,
        invariant_dim: report.invariant_dim,
        ext_dim: ext.map(|e| e.ext_dim),
        source: ext.map(|e| e.source.clone()),
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::index::{DegreeIndex, Span};
    use crate::steenrod::{hit_generators, sq};

    fn poly(k: usize, exps: &[&[u32]]) -> Polynomial {
        let terms: Vec<_> = exps.iter().map(|e| Monomial::new(e).unwrap()).collect();
        Polynomial::from_terms(k, terms[0].degree(), terms).unwrap()
    }

    #[test]
    fn substitution_examples() {
        let swap = GroupGenerator::transposition(2, 1, 2).unwrap();
        let tv = GroupGenerator::transvection(2).unwrap();
        assert_eq!(substitute(&swap, &poly(2, &[&[2, 1]])).unwrap(), poly(2, &[&[1, 2]]));
        assert_eq!(substitute(&tv, &poly(2, &[&[1, 0]])).unwrap(), poly(2, &[&[1, 0], &[0, 1]]));
        assert_eq!(substitute(&tv, &poly(2, &[&[2, 0]])).unwrap(), poly(2, &[&[2, 0], &[0, 2]]));
    }

    #[test]
    fn transvection_matches_repeated_multiplication() {
        // (x1 + x2)^a by multiplying a copies of x1 + x2
        let tv = GroupGenerator::transvection(2).unwrap();
        for a in 0..20u32 {
            let mut acc = poly(2, &[&[0, 0]]);
            for _ in 0..a {
                acc = acc.mul(&poly(2, &[&[1, 0], &[0, 1]]));
            }
            assert_eq!(substitute(&tv, &poly(2, &[&[a, 0]])).unwrap(), acc, "a = {a}");
        }
    }

    #[test]
    fn two_variables_degree_two() {
        let space = CohitSpace::compute(2, 2).unwrap();
        let action = QuotientAction::new(&space, standard_generators(2)).unwrap();
        for m in &action.matrices {
            assert_eq!(*m, BitMatrix::identity(1));
        }
        assert_eq!(invariant_dimension(&space).unwrap().invariant_dim, 1);
    }

    #[test]
    fn one_variable_is_trivial() {
        for n in [0, 1, 3, 7, 5] {
            let space = CohitSpace::compute(1, n).unwrap();
            assert_eq!(invariant_dimension(&space).unwrap().invariant_dim, space.dim());
        }
    }

    #[test]
    fn action_preserves_hit_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (k, n) in [(2, 8), (3, 9), (4, 10), (4, 12)] {
            let space = CohitSpace::compute(k, n).unwrap();
            let gens = all_transposition_generators(k);
            let mut checked = 0;
            while checked < 20 {
                let j = rng.gen_range(0..=n.ilog2());
                let src = DegreeIndex::new(k, n - (1 << j), Span::All).unwrap();
                let terms: Vec<_> = (0..rng.gen_range(1..4)).map(|_| src.monomial(rng.gen_range(0..src.len()))).collect();
                let h = sq(1 << j, &Polynomial::from_terms(k, src.degree(), terms).unwrap());
                if h.is_zero() {
                    continue;
                }
                for g in &gens {
                    assert!(space.is_hit(&substitute(g, &h).unwrap()).unwrap());
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn generator_images_of_hit_generators_are_hit() {
        let space = CohitSpace::compute(3, 7).unwrap();
        for g in hit_generators(3, 7).unwrap() {
            for gen in standard_generators(3) {
                assert!(space.is_hit(&substitute(&gen, &g.image).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn group_relations() {
        for k in 2..=4 {
            for n in [3, 5, 6, 8, 10, 12] {
                let space = CohitSpace::compute(k, n).unwrap();
                let a = QuotientAction::new(&space, standard_generators(k)).unwrap();
                let id = BitMatrix::identity(a.dim());
                for s in 0..k - 1 {
                    assert_eq!(a.word_matrix(&[s, s]), id);
                    if s + 1 < k - 1 {
                        assert_eq!(a.word_matrix(&[s, s + 1, s, s + 1, s, s + 1]), id);
                    }
                }
                let t = k - 1;
                // transvections have order two
                assert_eq!(a.word_matrix(&[t, t]), id);
            }
        }
    }

    #[test]
    fn invariants_do_not_depend_on_the_generating_set() {
        for k in 2..=3 {
            for n in 1..=14 {
                let space = CohitSpace::compute(k, n).unwrap();
                let a = QuotientAction::new(&space, standard_generators(k)).unwrap();
                let b = QuotientAction::new(&space, all_transposition_generators(k)).unwrap();
                assert_eq!(a.invariants().len(), b.invariants().len(), "(k, n) = ({k}, {n})");
            }
        }
    }

    #[test]
    fn invariants_are_fixed_by_random_words() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let space = CohitSpace::compute(4, 11).unwrap();
        let a = QuotientAction::new(&space, standard_generators(4)).unwrap();
        let inv = a.invariants();
        for _ in 0..20 {
            let word: Vec<usize> = (0..rng.gen_range(1..30)).map(|_| rng.gen_range(0..a.generators.len())).collect();
            let m = a.word_matrix(&word);
            for v in &inv {
                assert_eq!(&m.mul_vec(v), v);
            }
        }
    }

    /// Ext^2 is spanned by h_i h_j, i <= j, j != i + 1, in stem 2^i + 2^j - 2.
    fn ext2(n: u64) -> u64 {
        let mut c = 0;
        for i in 0..8u32 {
            for j in i..8u32 {
                if j != i + 1 && (1u64 << i) + (1u64 << j) - 2 == n {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn rank_two_transfer_is_an_isomorphism() {
        for n in 0..=40 {
            let space = CohitSpace::compute(2, n).unwrap();
            let inv = invariant_dimension(&space).unwrap();
            let ext = ExtData { k: 2, n, ext_dim: ext2(n), source: "h_i h_j".into() };
            let r = transfer_report(&inv, Some(&ext)).unwrap();
            assert_eq!(r.verdict, TransferVerdict::ConsistentWithIsomorphism, "n = {n}");
        }
    }

    #[test]
    fn missing_ext_data_is_one_sided() {
        let inv = invariant_dimension(&CohitSpace::compute(3, 6).unwrap()).unwrap();
        assert_eq!(transfer_report(&inv, None).unwrap().verdict, TransferVerdict::OneSided);
        let wrong = ExtData { k: 3, n: 7, ext_dim: 0, source: String::new() };
        assert!(transfer_report(&inv, Some(&wrong)).is_err());
    }

    #[test]
    fn ext_data_file_forms() {
        let dir = tempfile::tempdir().unwrap();
        let one = dir.path().join("one.json");
        std::fs::write(&one, r#"{"k":5,"n":24,"ext_dim":0,"source":"x"}"#).unwrap();
        assert_eq!(ExtData::load(&one, 5, 24).unwrap().unwrap().ext_dim, 0);
        assert!(ExtData::load(&one, 5, 25).unwrap().is_none());
        let many = dir.path().join("many.json");
        std::fs::write(&many, r#"[{"k":1,"n":1,"ext_dim":1,"source":"h1"},{"k":1,"n":3,"ext_dim":1,"source":"h2"}]"#)
            .unwrap();
        assert_eq!(ExtData::load(&many, 1, 3).unwrap().unwrap().source, "h2");
    }

    proptest! {
        #[test]
        fn substitution_preserves_degree(a in 0u32..40, b in 0u32..40, c in 0u32..40) {
            let f = poly(3, &[&[a, b, c]]);
            for g in all_transposition_generators(3) {
                let h = substitute(&g, &f).unwrap();
                prop_assert!(h.terms().iter().all(|t| t.degree() == f.degree()));
                // both kinds are involutions
                prop_assert_eq!(substitute(&g, &h).unwrap(), f.clone());
            }
        }
    }
}
