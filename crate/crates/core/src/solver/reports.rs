use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{binomial, mu};
use crate::error::{invalid, Error, Result};
use crate::gf2::{words_for, BitVector, EchelonBasis, InsertOutcome};
use crate::index::index_tuples;
use crate::monomial::{Monomial, WeightVector};
use crate::steenrod::Polynomial;

use super::direct::DirectSolution;
use super::positive::{positive_dimension, PositivePart};
use super::space::{CohitSpace, PartSource};

/// How a basis was obtained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "plan")]
pub enum Provenance {
    #[default]
    Direct,
    ViaReduction(String),
}

/// A sorted list of admissible monomials for `(k, n)` or `(k, ω)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleBasis {
    pub k: usize,
    pub n: u64,
    pub omega: Option<WeightVector>,
    pub dim: usize,
    pub monomials: Vec<Monomial>,
    #[serde(skip)]
    pub provenance: Provenance,
}

impl AdmissibleBasis {
    pub fn new(k: usize, n: u64, omega: Option<WeightVector>, monomials: Vec<Monomial>) -> AdmissibleBasis {
        AdmissibleBasis { k, n, omega, dim: monomials.len(), monomials, provenance: Provenance::Direct }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("basis serializes")
    }
}

/// Dimension and admissible basis of `(QP_k)_n`.
pub fn quotient_dimension(k: usize, n: u64, source: &mut impl PartSource) -> Result<AdmissibleBasis> {
    let space = CohitSpace::build(k, n, source)?;
    Ok(AdmissibleBasis::new(k, n, None, space.basis().to_vec()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaBlockReport {
    pub k: usize,
    pub omega: WeightVector,
    /// `dim QP_k(ω)`.
    pub dim_all: usize,
    /// `dim QP_k^+(ω)`.
    pub dim_positive: usize,
    pub admissible_all: Vec<Monomial>,
    pub admissible_positive: Vec<Monomial>,
}

/// `QP_k(ω)` and `QP_k^+(ω)` by counting the admissible monomials of weight `ω`.
///
/// Each support stratum is eliminated only above `ω`.
pub fn omega_block(k: usize, omega: &WeightVector) -> Result<OmegaBlockReport> {
    let n = omega.degree();
    if omega.entries().iter().any(|&e| e as usize > k) {
        return Err(invalid(format!("weight vector {omega} has an entry above {k}")));
    }
    let mut all = Vec::new();
    let mut positive = Vec::new();
    if n == 0 {
        all.push(Monomial::one(k));
    } else if mu(n) as usize <= k {
        for r in (mu(n) as usize).max(omega.get(1) as usize)..=k.min(n as usize) {
            let part = PositivePart::compute_above(r, n, omega)?;
            let range = part.index().weight_range(omega);
            let adm: Vec<Monomial> = part
                .admissible_columns()
                .iter()
                .filter(|&&c| range.contains(&(c as usize)))
                .map(|&c| part.index().monomial(c as usize))
                .collect();
            for j in index_tuples(k, r) {
                for a in &adm {
                    let m = a.inject_subset(&j, k)?;
                    if r == k {
                        positive.push(m);
                    }
                    all.push(m);
                }
            }
        }
    }
    all.sort_unstable();
    positive.sort_unstable();
    Ok(OmegaBlockReport {
        k,
        omega: omega.clone(),
        dim_all: all.len(),
        dim_positive: positive.len(),
        admissible_all: all,
        admissible_positive: positive,
    })
}

/// `dim QP_k(ω)` and `dim QP_k^+(ω)` by the subspace definition: the hit
/// subspace is intersected with the span of monomials of weight at most `ω`,
/// and the span of smaller weights is added.
pub fn omega_block_by_intersection(k: usize, omega: &WeightVector) -> Result<(usize, usize)> {
    let n = omega.degree();
    if n == 0 {
        return Ok((1, usize::from(k == 0)));
    }
    if mu(n) as usize > k {
        return Ok((0, 0));
    }
    let direct = DirectSolution::compute(k, n)?;
    let hit = direct.hit.to_reduced()?;
    let index = &direct.index;
    let range = index.weight_range(omega);
    let block = |keep: &dyn Fn(usize) -> bool| -> Result<usize> {
        let upto = EchelonBasis::coordinate_span(index.len(), (0..range.end).filter(|&c| keep(c)));
        let lower = EchelonBasis::coordinate_span(index.len(), (0..range.start).filter(|&c| keep(c)));
        let relations = hit.intersect(&upto)?.sum(&lower)?;
        Ok(upto.rank() - relations.rank())
    };
    let dim_all = block(&|_| true)?;
    let dim_positive = block(&|c| index.monomial(c).is_positive())?;
    Ok((dim_all, dim_positive))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitReport {
    pub k: usize,
    pub n: u64,
    pub dim_zero: usize,
    pub dim_positive: usize,
    pub zero_basis: Vec<Monomial>,
    pub positive_basis: Vec<Monomial>,
}

/// The decomposition `QP_k = QP_k^0 ⊕ QP_k^+` in degree `n`.
pub fn qp0_qpplus_split(space: &CohitSpace) -> SplitReport {
    let zero_basis: Vec<_> = space.zero_basis().copied().collect();
    let positive_basis: Vec<_> = space.positive_basis().copied().collect();
    SplitReport {
        k: space.k(),
        n: space.degree(),
        dim_zero: zero_basis.len(),
        dim_positive: positive_basis.len(),
        zero_basis,
        positive_basis,
    }
}

/// `dim (QP_k^0)_n` from the positive dimensions in fewer variables.
pub fn mothebe_dimension(k: usize, n: u64, table: &BTreeMap<usize, u64>) -> Result<u64> {
    if n == 0 {
        return Ok(u64::from(k == 0));
    }
    let mut total = 0u64;
    for r in (mu(n) as usize)..k {
        let d = table
            .get(&r)
            .ok_or_else(|| Error::MissingData(format!("dim (QP_{r}^+)_{n} not supplied")))?;
        total += binomial(k as u64, r as u64).expect("small binomial") * d;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageMethod {
    /// The classes were reduced in the target degree and their rank taken.
    Computed,
    /// The down map is onto and splits the up map, so the rank is `dim (QP_k)_d`.
    Epimorphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageReport {
    pub k: usize,
    pub d: u64,
    pub dim: usize,
    pub method: ImageMethod,
}

/// Rank of the classes `[x_1…x_k u^2]` in `(QP_k)_{2d+k}`, `u` admissible of degree `d`.
///
/// The computed route reduces the classes modulo the hit subspace and all
/// monomials with `ω_1 < k`. That rank is a lower bound for the true one and
/// `dim (QP_k)_d` is an upper bound, so agreement settles it.
pub fn kameko_image_dimension(k: usize, d: u64, source: &mut impl PartSource, compute: bool) -> Result<ImageReport> {
    let low = CohitSpace::build(k, d, source)?;
    if !compute {
        return Ok(ImageReport { k, d, dim: low.dim(), method: ImageMethod::Epimorphism });
    }
    let part = PositivePart::compute_above(k, 2 * d + k as u64, &WeightVector::new(vec![k as u32]))?;
    let index = part.index();
    let mut span = EchelonBasis::new(index.len());
    for u in low.basis() {
        let c = index.position(&u.kameko_up()).expect("the up map lands in the positive part");
        let mut words = vec![0u64; words_for(index.len())];
        words[c / 64] |= 1 << (c % 64);
        part.reduce_words(&mut words);
        span.insert_row(BitVector::from_words(index.len(), words)?)?;
    }
    Ok(ImageReport { k, d, dim: span.rank(), method: ImageMethod::Computed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelBlock {
    pub omega: WeightVector,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub k: usize,
    pub d: u64,
    pub degree: u64,
    /// `dim (QP_k)_d`.
    pub dim_target: usize,
    /// `dim (QP_k)_{2d+k}`.
    pub dim_source: usize,
    pub dim_kernel: usize,
    /// `dim (QP_k^0)_{2d+k}`, all of which lies in the kernel.
    pub dim_zero: usize,
    /// `dim (QP_k^+)_{2d+k}`, from the rank of the positive hit subspace.
    pub dim_positive: usize,
    /// Positive admissibles with `ω_1 = k`.
    pub dim_image_blocks: usize,
    /// Blocks were resolved for weights at or above this one.
    pub floor: Option<WeightVector>,
    /// Nonzero positive blocks at or above the floor with `ω_1 < k`.
    pub kernel_blocks: Vec<KernelBlock>,
    /// Positive dimension not accounted for by blocks at or above the floor.
    pub dim_below_floor: usize,
}

/// The kernel of the Kameko down map from degree `2d+k` to degree `d`.
///
/// The positive blocks are resolved only at or above `floor`; whatever the
/// positive rank leaves over lies in blocks below it.
pub fn kameko_kernel_report(
    k: usize,
    d: u64,
    source: &mut impl PartSource,
    floor: Option<&WeightVector>,
) -> Result<KernelReport> {
    let degree = 2 * d + k as u64;
    let low = CohitSpace::build(k, d, source)?;
    let mut dim_zero = 0;
    for r in (mu(degree) as usize).max(1)..k {
        dim_zero += binomial(k as u64, r as u64).expect("small binomial") as usize * source.part(r, degree)?.dim();
    }
    let dim_positive = positive_dimension(k, degree)?;
    let part = match floor {
        Some(w) => PositivePart::compute_above(k, degree, w)?,
        None => PositivePart::compute(k, degree)?,
    };
    let mut dim_image_blocks = 0;
    let mut kernel_blocks = Vec::new();
    let mut above = 0;
    for (omega, dim) in positive_block_dims(&part) {
        above += dim;
        if omega.get(1) as usize == k {
            dim_image_blocks += dim;
        } else {
            kernel_blocks.push(KernelBlock { omega, dim });
        }
    }
    kernel_blocks.reverse();
    let dim_source = dim_zero + dim_positive;
    Ok(KernelReport {
        k,
        d,
        degree,
        dim_target: low.dim(),
        dim_source,
        dim_kernel: dim_source.checked_sub(low.dim()).ok_or_else(|| {
            Error::Internal(format!("degree {degree} is smaller than degree {d}, the down map is not onto"))
        })?,
        dim_zero,
        dim_positive,
        dim_image_blocks,
        floor: floor.cloned(),
        kernel_blocks,
        dim_below_floor: dim_positive - above,
    })
}

/// Reading of the bracket in the `M^d(n)` construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MInterpretation {
    /// One class per `(d, x)`: the sum over `i` of `x_i^{2^d-1} f_i(x)`.
    Sum,
    /// One class per `(d, i, x)`.
    Set,
}

impl std::str::FromStr for MInterpretation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(MInterpretation::Sum),
            "set" => Ok(MInterpretation::Set),
            _ => Err(invalid(format!("unknown interpretation {s:?}, expected sum or set"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCandidate {
    pub d: u32,
    /// `None` under the sum reading.
    pub i: Option<usize>,
    pub x: Monomial,
    /// Terms of weight `ω` in `P_k^+`.
    pub projected: Vec<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MClassReport {
    pub k: usize,
    pub n: u64,
    pub omega: WeightVector,
    pub interpretation: MInterpretation,
    pub candidates: Vec<MCandidate>,
    pub span_dim: usize,
    pub block_dim: usize,
    pub complement_dim: usize,
}

/// The classes `x_i^{2^d-1} f_i(x)`, `x` admissible in `P_{k-1}` of degree
/// `n - 2^d + 1`, projected to the positive block `QP_k^+(ω)`.
pub fn induced_m_classes(
    k: usize,
    omega: &WeightVector,
    interpretation: MInterpretation,
    source: &mut impl PartSource,
) -> Result<MClassReport> {
    if k < 2 {
        return Err(invalid("the construction needs at least two variables"));
    }
    let n = omega.degree();
    let part = PositivePart::compute_above(k, n, omega)?;
    let index = part.index();
    let range = index.weight_range(omega);
    let block_dim = part.admissible_columns().iter().filter(|&&c| range.contains(&(c as usize))).count();
    let mut span = EchelonBasis::new(index.len());
    let mut candidates = Vec::new();
    let mut d = 1u32;
    while (1u64 << d) - 1 <= n {
        let low = CohitSpace::build(k - 1, n - (1 << d) + 1, source)?;
        for x in low.basis() {
            let terms: Vec<(usize, Monomial)> = (1..=k)
                .map(|i| {
                    let mut y = x.inject_variable(i)?;
                    y.exps_mut()[i - 1] = (1 << d) - 1;
                    Ok((i, y))
                })
                .collect::<Result<_>>()?;
            let groups: Vec<(Option<usize>, Vec<Monomial>)> = match interpretation {
                MInterpretation::Set => terms.into_iter().map(|(i, y)| (Some(i), vec![y])).collect(),
                MInterpretation::Sum => vec![(None, terms.into_iter().map(|t| t.1).collect())],
            };
            for (i, ys) in groups {
                let f = Polynomial::from_terms(k, n, ys)?;
                let projected: Vec<Monomial> = f
                    .terms()
                    .iter()
                    .filter(|t| t.is_positive() && index.position(t).is_some_and(|c| range.contains(&c)))
                    .copied()
                    .collect();
                if projected.is_empty() {
                    continue;
                }
                let mut words = vec![0u64; words_for(index.len())];
                for t in &projected {
                    let c = index.position(t).expect("filtered");
                    words[c / 64] ^= 1 << (c % 64);
                }
                part.reduce_words(&mut words);
                let v = BitVector::from_words(index.len(), words)?;
                if let InsertOutcome::Added { .. } = span.insert_row(v)? {
                    log::trace!("new class from d={d} x={x}");
                }
                candidates.push(MCandidate { d, i, x: *x, projected });
            }
        }
        d += 1;
    }
    let span_dim = span.rank();
    Ok(MClassReport {
        k,
        n,
        omega: omega.clone(),
        interpretation,
        candidates,
        span_dim,
        block_dim,
        complement_dim: block_dim - span_dim,
    })
}

/// Positive admissible monomials of `(P_k)_n` grouped by weight, via the
/// positive part alone.
pub fn positive_block_dims(part: &PositivePart) -> BTreeMap<WeightVector, usize> {
    let mut out = BTreeMap::new();
    for m in part.admissible() {
        *out.entry(m.weight_vector()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Compute, DirectSolution};
    use crate::steenrod::hit_generators;

    fn w(s: &str) -> WeightVector {
        s.parse().unwrap()
    }

    #[test]
    fn basis_json_shape() {
        let b = quotient_dimension(2, 2, &mut Compute).unwrap();
        assert_eq!(b.to_json(), r#"{"k":2,"n":2,"omega":null,"dim":1,"monomials":[[1,1]]}"#);
        let back: AdmissibleBasis = serde_json::from_str(&b.to_json()).unwrap();
        assert_eq!(back, b);
    }

    use crate::index::enumerate_weight_vectors;

    #[test]
    fn blocks_agree_with_the_subspace_definition() {
        for (k, top) in [(2, 12), (3, 12), (4, 9)] {
            for n in 1..=top {
                for omega in enumerate_weight_vectors(k, n) {
                    let r = omega_block(k, &omega).unwrap();
                    let (all, pos) = omega_block_by_intersection(k, &omega).unwrap();
                    assert_eq!((r.dim_all, r.dim_positive), (all, pos), "k = {k}, ω = {omega}");
                    assert!(r.dim_positive <= r.dim_all);
                }
            }
        }
    }

    #[test]
    fn blocks_sum_to_the_total() {
        for (k, n) in [(3, 11), (4, 10), (4, 17), (5, 12)] {
            let total = CohitSpace::compute(k, n).unwrap();
            let sum: usize = enumerate_weight_vectors(k, n).iter().map(|o| omega_block(k, o).unwrap().dim_all).sum();
            assert_eq!(sum, total.dim(), "(k, n) = ({k}, {n})");
        }
    }

    #[test]
    fn block_members_have_the_block_weight() {
        let r = omega_block(4, &w("2,2,1")).unwrap();
        assert!(r.admissible_all.iter().all(|m| m.weight_vector() == w("2,2,1")));
        assert!(r.admissible_positive.iter().all(|m| m.is_positive()));
    }

    #[test]
    fn wood_blocks_vanish() {
        let r = omega_block(1, &w("0,1")).unwrap();
        assert_eq!((r.dim_all, r.dim_positive), (0, 0));
    }

    #[test]
    fn split_is_a_decomposition() {
        for k in 1..=4 {
            for n in 0..=20 {
                let space = CohitSpace::compute(k, n).unwrap();
                let s = qp0_qpplus_split(&space);
                assert_eq!(s.dim_zero + s.dim_positive, space.dim());
            }
        }
        let s = qp0_qpplus_split(&CohitSpace::compute(2, 2).unwrap());
        assert_eq!((s.dim_zero, s.dim_positive), (0, 1));
    }

    #[test]
    fn zero_part_is_the_union_of_lower_bases() {
        for k in 2..=5 {
            for n in 1..=if k == 5 { 14 } else { 25 } {
                let space = CohitSpace::compute(k, n).unwrap();
                let lower = CohitSpace::compute(k - 1, n).unwrap();
                let mut union: Vec<Monomial> = (1..=k)
                    .flat_map(|i| lower.basis().iter().map(move |x| x.inject_variable(i).unwrap()))
                    .collect();
                union.sort_unstable();
                union.dedup();
                let zero: Vec<Monomial> = space.zero_basis().copied().collect();
                assert_eq!(zero, union, "(k, n) = ({k}, {n})");
            }
        }
    }

    #[test]
    fn mothebe_formula_matches_the_zero_part() {
        for k in 1..=5 {
            for n in 1..=if k == 5 { 20 } else { 30 } {
                let direct = DirectSolution::compute(k, n).unwrap();
                let zero = direct.admissible().iter().filter(|m| !m.is_positive()).count() as u64;
                let table: BTreeMap<usize, u64> =
                    (1..k).map(|r| (r, PositivePart::compute(r, n).unwrap().dim() as u64)).collect();
                assert_eq!(mothebe_dimension(k, n, &table).unwrap(), zero, "(k, n) = ({k}, {n})");
            }
        }
    }

    #[test]
    fn mothebe_needs_every_entry() {
        let table = BTreeMap::from([(3, 8)]);
        assert!(matches!(mothebe_dimension(5, 53, &table), Err(Error::MissingData(_))));
        assert_eq!(mothebe_dimension(2, 2, &BTreeMap::new()).unwrap(), 0);
    }

    #[test]
    fn kameko_image_routes_agree() {
        for (k, d) in [(1, 0), (2, 3), (3, 4), (3, 7), (4, 3), (4, 5)] {
            let c = kameko_image_dimension(k, d, &mut Compute, true).unwrap();
            let e = kameko_image_dimension(k, d, &mut Compute, false).unwrap();
            assert_eq!(c.dim, e.dim, "(k, d) = ({k}, {d})");
        }
        assert_eq!(kameko_image_dimension(1, 0, &mut Compute, true).unwrap().dim, 1);
    }

    #[test]
    fn kameko_down_preserves_hit_elements() {
        for (k, d) in [(3, 5), (4, 4)] {
            let low = CohitSpace::compute(k, d).unwrap();
            for g in hit_generators(k, 2 * d + k as u64).unwrap() {
                assert!(low.is_hit(&g.image.kameko_down()).unwrap());
            }
        }
    }

    #[test]
    fn kernel_accounts_for_the_source_dimension() {
        for (k, d) in [(3, 4), (4, 5), (4, 10), (5, 3)] {
            let r = kameko_kernel_report(k, d, &mut Compute, None).unwrap();
            let src = CohitSpace::compute(k, 2 * d + k as u64).unwrap().dim();
            assert_eq!(r.dim_source, src, "(k, d) = ({k}, {d})");
            assert_eq!(r.dim_image_blocks, r.dim_target);
            assert_eq!(r.dim_below_floor, 0);
            let blocks: usize = r.kernel_blocks.iter().map(|b| b.dim).sum();
            assert_eq!(r.dim_kernel, r.dim_zero + blocks);
        }
    }

    #[test]
    fn kernel_with_a_floor_leaves_the_rest_below() {
        let floor = w("2,2,1");
        let r = kameko_kernel_report(4, 5, &mut Compute, Some(&floor)).unwrap();
        let full = kameko_kernel_report(4, 5, &mut Compute, None).unwrap();
        let below: usize = full.kernel_blocks.iter().filter(|b| b.omega < floor).map(|b| b.dim).sum();
        assert_eq!(r.dim_below_floor, below);
        assert_eq!(r.dim_kernel, full.dim_kernel);
    }

    #[test]
    fn kernel_vanishes_in_the_isomorphism_range() {
        // mu(2d + k) = k
        let r = kameko_kernel_report(4, 10, &mut Compute, None).unwrap();
        assert_eq!(r.dim_kernel, 0);
    }

    #[test]
    fn top_weight_admissibles_are_kameko_images() {
        for (k, d) in [(3, 4), (4, 5), (4, 7)] {
            let low = CohitSpace::compute(k, d).unwrap();
            let high = CohitSpace::compute(k, 2 * d + k as u64).unwrap();
            let top: Vec<Monomial> =
                high.positive_basis().filter(|m| m.weight_vector().get(1) as usize == k).copied().collect();
            let mut ups: Vec<Monomial> = low.basis().iter().map(|u| u.kameko_up()).collect();
            ups.sort_unstable();
            assert_eq!(top, ups, "(k, d) = ({k}, {d})");
        }
    }

    #[test]
    fn m_classes_lie_in_the_block() {
        let omega = w("3,2,1");
        for interp in [MInterpretation::Sum, MInterpretation::Set] {
            let r = induced_m_classes(4, &omega, interp, &mut Compute).unwrap();
            assert_eq!(r.block_dim, omega_block(4, &omega).unwrap().dim_positive);
            assert!(r.span_dim <= r.block_dim);
            for c in &r.candidates {
                assert!(c.projected.iter().all(|m| m.weight_vector() == omega && m.is_positive()));
            }
        }
    }

    #[test]
    fn m_candidate_weights() {
        // x1^7 times a shifted monomial in the remaining variables
        let x = Monomial::new(&[1, 1, 1]).unwrap();
        let mut y = x.inject_variable(1).unwrap();
        y.exps_mut()[0] = 7;
        assert_eq!(y.weight_vector(), w("4,1,1"));
    }
}
