use crate::arith::mu;
use crate::error::{invalid, Result};
use crate::gf2::{BitVector, EchelonBasis, SparseEchelon, SparseEliminator};
use crate::index::{DegreeIndex, Span};
use crate::monomial::Monomial;
use crate::steenrod::hit_generators;

/// The hit subspace of the whole of `(P_k)_n`, eliminated without any
/// splitting. Serves as the reference route for the split computation.
#[derive(Clone, Debug)]
pub struct DirectSolution {
    pub index: DegreeIndex,
    pub hit: SparseEchelon,
}

impl DirectSolution {
    pub fn compute(k: usize, n: u64) -> Result<DirectSolution> {
        if n == 0 {
            return Err(invalid("degree 0 has no hit elements"));
        }
        let index = DegreeIndex::new(k, n, Span::All)?;
        let mut elim = SparseEliminator::new(index.len());
        for g in hit_generators(k, n)? {
            let cols = g
                .image
                .terms()
                .iter()
                .map(|t| index.position(t).expect("same stratum") as u32)
                .collect();
            elim.push(cols);
        }
        Ok(DirectSolution { hit: elim.finish(), index })
    }

    /// Admissible monomials: the columns that are not the leading term of any hit element.
    pub fn admissible(&self) -> Vec<Monomial> {
        self.hit.free_columns().into_iter().map(|c| self.index.monomial(c)).collect()
    }

    pub fn dim(&self) -> usize {
        self.index.len() - self.hit.rank()
    }
}

/// The admissibility sweep: walk the monomials upward, declaring each one
/// inadmissible when its unit vector already lies in the span of the hit
/// subspace and all smaller monomials, then add it to that span.
pub fn admissibility_sweep(index: &DegreeIndex, hit: &EchelonBasis) -> Result<Vec<Monomial>> {
    let mut span = hit.clone();
    let mut out = Vec::new();
    for c in 0..index.len() {
        let e = BitVector::unit(index.len(), c);
        if !span.contains(&e)? {
            out.push(index.monomial(c));
        }
        span.insert_row(e)?;
    }
    Ok(out)
}

/// Direct dimension with Wood's vanishing applied first.
pub fn direct_dimension(k: usize, n: u64) -> Result<usize> {
    if n == 0 {
        return Ok(1);
    }
    if mu(n) as usize > k {
        return Ok(0);
    }
    Ok(DirectSolution::compute(k, n)?.dim())
}
