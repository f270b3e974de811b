use crate::arith::mu;
use crate::error::Result;
use crate::gf2::{sparse_rank, SparseEchelon, SparseEliminator};
use crate::index::{DegreeIndex, Span};
use crate::monomial::{Monomial, WeightVector};
use crate::steenrod::sq_monomial_each;

/// The hit subspace of `(P_r^+)_n` and its admissible monomials.
#[derive(Clone, Debug)]
pub struct PositivePart {
    index: DegreeIndex,
    /// `None` when every monomial is hit (`mu(n) > r`).
    hit: Option<SparseEchelon>,
    admissible: Vec<u32>,
    floor: usize,
}

impl PositivePart {
    pub fn compute(r: usize, n: u64) -> Result<PositivePart> {
        let index = DegreeIndex::new(r, n, Span::Positive)?;
        PositivePart::eliminate(index, 0)
    }

    /// Only the columns of weight at least `omega` are kept. The admissible
    /// monomials found are exactly those of the full part with weight at
    /// least `omega`; reduction is valid modulo smaller weights.
    pub fn compute_above(r: usize, n: u64, omega: &WeightVector) -> Result<PositivePart> {
        let index = DegreeIndex::new(r, n, Span::Positive)?;
        let floor = index.weight_start(omega);
        PositivePart::eliminate(index, floor)
    }

    fn eliminate(index: DegreeIndex, floor: usize) -> Result<PositivePart> {
        let n = index.degree();
        if index.is_empty() || mu(n) as usize > index.k() {
            return Ok(PositivePart { index, hit: None, admissible: Vec::new(), floor });
        }
        let hit = eliminate_positive(&index, floor)?;
        Ok(PositivePart::from_parts(index, Some(hit)))
    }

    pub(crate) fn from_parts(index: DegreeIndex, hit: Option<SparseEchelon>) -> PositivePart {
        let (admissible, floor) = match &hit {
            Some(h) => (h.free_columns().into_iter().map(|c| c as u32).collect(), h.floor()),
            None => (Vec::new(), 0),
        };
        PositivePart { index, hit, admissible, floor }
    }

    /// Columns below this were projected away; zero for a complete part.
    pub fn floor(&self) -> usize {
        self.floor
    }

    pub fn is_complete(&self) -> bool {
        self.floor == 0
    }

    pub fn index(&self) -> &DegreeIndex {
        &self.index
    }

    pub fn hit(&self) -> Option<&SparseEchelon> {
        self.hit.as_ref()
    }

    /// Columns of the admissible monomials, ascending.
    pub fn admissible_columns(&self) -> &[u32] {
        &self.admissible
    }

    pub fn admissible(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.admissible.iter().map(|&c| self.index.monomial(c as usize))
    }

    pub fn dim(&self) -> usize {
        self.admissible.len()
    }

    /// Reduces packed coordinates modulo the hit subspace in place.
    pub fn reduce_words(&self, v: &mut [u64]) {
        match &self.hit {
            Some(h) => h.reduce_words(v),
            None => v.iter_mut().for_each(|w| *w = 0),
        }
    }
}

/// `dim (QP_r^+)_n` from the rank of the positive hit subspace alone,
/// without the admissible basis. Much cheaper than [`PositivePart::compute`]
/// in large degrees.
pub fn positive_dimension(r: usize, n: u64) -> Result<usize> {
    let index = DegreeIndex::new(r, n, Span::Positive)?;
    if index.is_empty() || mu(n) as usize > r {
        return Ok(0);
    }
    let mut rows = Vec::new();
    positive_generator_rows(&index, 0, |cols| rows.push(cols.to_vec()))?;
    Ok(index.len() - sparse_rank(index.len(), rows))
}

/// Eliminates all positive hit generators `Sq^{2^u}(m)` over the columns of
/// `index`, discarding columns below `floor`.
pub(crate) fn eliminate_positive(index: &DegreeIndex, floor: usize) -> Result<SparseEchelon> {
    let mut elim = SparseEliminator::with_floor(index.len(), floor);
    positive_generator_rows(index, floor, |cols| elim.push(cols.to_vec()))?;
    log::debug!("eliminating {} rows over {} columns (floor {floor})", elim.pushed(), index.len());
    Ok(elim.finish())
}

/// Emits the columns at or above `floor` of each `Sq^{2^u}(m)`, `m` positive.
fn positive_generator_rows(index: &DegreeIndex, floor: usize, mut emit: impl FnMut(&[u32])) -> Result<()> {
    let r = index.k();
    let n = index.degree();
    let mut u = 0;
    let mut terms: Vec<u32> = Vec::new();
    while 1u64 << u <= n - r as u64 {
        let src = DegreeIndex::new(r, n - (1 << u), Span::Positive)?;
        for m in src.monomials() {
            terms.clear();
            sq_monomial_each(1 << u, m, |t| {
                let c = index.position(&t).expect("image of a positive monomial is positive");
                if c >= floor {
                    terms.push(c as u32);
                }
            });
            if !terms.is_empty() {
                emit(&terms);
            }
        }
        u += 1;
    }
    Ok(())
}
