use crate::error::{Error, Result};

use super::bitvec::{highest_bit, BitVector};

const NONE: u32 = u32::MAX;

/// Outcome of [`EchelonBasis::insert_row`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    Absorbed,
    Added { pivot: usize },
}

/// A subspace of `F_2^ncols` held in reduced row-echelon form.
///
/// The pivot of a row is its largest set column. Every pivot column is zero in
/// all other rows, and rows are kept sorted by ascending pivot, so two bases of
/// the same subspace compare equal.
#[derive(Clone, PartialEq, Eq)]
pub struct EchelonBasis {
    ncols: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
    row_of: Vec<u32>,
    pivot_mask: BitVector,
}

impl std::fmt::Debug for EchelonBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EchelonBasis")
            .field("ncols", &self.ncols)
            .field("rank", &self.rank())
            .field("pivots", &self.pivots)
            .finish()
    }
}

impl EchelonBasis {
    pub fn new(ncols: usize) -> EchelonBasis {
        EchelonBasis {
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
            row_of: vec![NONE; ncols],
            pivot_mask: BitVector::zeros(ncols),
        }
    }

    /// The whole space `F_2^ncols`.
    pub fn full(ncols: usize) -> EchelonBasis {
        let mut b = EchelonBasis::new(ncols);
        for c in 0..ncols {
            b.rows.push(BitVector::unit(ncols, c));
            b.pivots.push(c);
            b.row_of[c] = c as u32;
            b.pivot_mask.set(c, true);
        }
        b
    }

    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = BitVector>) -> Result<EchelonBasis> {
        let mut b = EchelonBasis::new(ncols);
        for r in rows {
            b.insert_row(r)?;
        }
        Ok(b)
    }

    /// Assembles a basis from rows already in reduced echelon form, ascending by pivot.
    pub(crate) fn from_reduced_rows(ncols: usize, rows: Vec<BitVector>) -> Result<EchelonBasis> {
        let mut b = EchelonBasis::new(ncols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(Error::LengthMismatch { expected: ncols, found: r.len() });
            }
            let p = r
                .highest_set_bit()
                .ok_or_else(|| Error::InvalidInput(format!("row {i} is zero")))?;
            if b.pivots.last().is_some_and(|&q| q >= p) {
                return Err(Error::InvalidInput(format!("row {i} pivot {p} out of order")));
            }
            b.pivots.push(p);
            b.row_of[p] = i as u32;
            b.pivot_mask.set(p, true);
        }
        for (i, r) in rows.iter().enumerate() {
            let mut overlap = r.clone();
            overlap.words_mut().iter_mut().zip(b.pivot_mask.words()).for_each(|(a, m)| *a &= m);
            if overlap.count_ones() != 1 {
                return Err(Error::InvalidInput(format!("row {i} is not reduced")));
            }
        }
        b.rows = rows;
        Ok(b)
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// Pivot columns, ascending.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.row_of[col] != NONE
    }

    pub fn pivot_mask(&self) -> &BitVector {
        &self.pivot_mask
    }

    /// The row whose pivot is `col`.
    pub fn row_for_pivot(&self, col: usize) -> Option<&BitVector> {
        match self.row_of.get(col) {
            Some(&r) if r != NONE => Some(&self.rows[r as usize]),
            _ => None,
        }
    }

    fn check_len(&self, v: &BitVector) -> Result<()> {
        if v.len() != self.ncols {
            return Err(Error::LengthMismatch { expected: self.ncols, found: v.len() });
        }
        Ok(())
    }

    /// Clears every pivot column of `v` by adding the matching rows.
    pub(crate) fn reduce_words(&self, v: &mut [u64]) {
        for wi in 0..v.len() {
            let mut m = v[wi] & self.pivot_mask.words()[wi];
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                let row = &self.rows[self.row_of[wi * 64 + b] as usize];
                let top = wi + 1;
                super::xor_words(&mut v[..top], &row.words()[..top]);
            }
        }
    }

    /// The representative of `v + rowspace` with zeros in all pivot columns.
    pub fn reduce_vector(&self, v: &BitVector) -> Result<BitVector> {
        self.check_len(v)?;
        let mut out = v.clone();
        self.reduce_words(out.words_mut());
        Ok(out)
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        Ok(self.reduce_vector(v)?.is_zero())
    }

    pub fn insert_row(&mut self, v: BitVector) -> Result<InsertOutcome> {
        self.check_len(&v)?;
        let mut v = v;
        self.reduce_words(v.words_mut());
        let Some(p) = highest_bit(v.words()) else {
            return Ok(InsertOutcome::Absorbed);
        };
        for r in self.rows.iter_mut() {
            if r.get(p) {
                r.xor_assign(&v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        self.pivot_mask.set(p, true);
        for (i, &q) in self.pivots.iter().enumerate().skip(at) {
            self.row_of[q] = i as u32;
        }
        Ok(InsertOutcome::Added { pivot: p })
    }

    /// `U + V`.
    pub fn sum(&self, other: &EchelonBasis) -> Result<EchelonBasis> {
        if other.ncols != self.ncols {
            return Err(Error::LengthMismatch { expected: self.ncols, found: other.ncols });
        }
        let mut b = self.clone();
        for r in &other.rows {
            b.insert_row(r.clone())?;
        }
        Ok(b)
    }

    /// `U ∩ V` by the Zassenhaus construction: echelonize the pairs `(u, u)` and
    /// `(v, 0)` in the doubled space; rows with vanishing first component span
    /// the intersection in their second component.
    pub fn intersect(&self, other: &EchelonBasis) -> Result<EchelonBasis> {
        if other.ncols != self.ncols {
            return Err(Error::LengthMismatch { expected: self.ncols, found: other.ncols });
        }
        let n = self.ncols;
        // first component occupies the high columns n..2n so it is eliminated first
        let lift = |lo: Option<&BitVector>, hi: &BitVector| {
            let mut w = BitVector::zeros(2 * n);
            for c in hi.ones() {
                w.set(n + c, true);
            }
            if let Some(lo) = lo {
                for c in lo.ones() {
                    w.set(c, true);
                }
            }
            w
        };
        let mut big = EchelonBasis::new(2 * n);
        for u in &self.rows {
            big.insert_row(lift(Some(u), u))?;
        }
        for v in &other.rows {
            big.insert_row(lift(None, v))?;
        }
        let mut out = EchelonBasis::new(n);
        for (r, &p) in big.rows.iter().zip(&big.pivots) {
            if p < n {
                let w = BitVector::from_indices(n, r.ones());
                out.insert_row(w)?;
            }
        }
        Ok(out)
    }

    /// Basis of the subspace spanned by the unit vectors of `cols`.
    pub fn coordinate_span(ncols: usize, cols: impl IntoIterator<Item = usize>) -> EchelonBasis {
        let mut cols: Vec<usize> = cols.into_iter().collect();
        cols.sort_unstable();
        cols.dedup();
        let rows = cols.iter().map(|&c| BitVector::unit(ncols, c)).collect();
        EchelonBasis::from_reduced_rows(ncols, rows).expect("unit vectors are reduced")
    }
}
