use std::fmt;

use crate::error::{Error, Result};

use super::bitvec::BitVector;
use super::echelon::EchelonBasis;

/// A dense matrix over `F_2`, stored by rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> BitMatrix {
        BitMatrix { ncols, rows: vec![BitVector::zeros(ncols); nrows] }
    }

    pub fn identity(n: usize) -> BitMatrix {
        BitMatrix { ncols: n, rows: (0..n).map(|i| BitVector::unit(n, i)).collect() }
    }

    /// The matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(nrows: usize, columns: &[BitVector]) -> BitMatrix {
        let mut m = BitMatrix::zeros(nrows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for i in c.ones() {
                m.rows[i].set(j, true);
            }
        }
        m
    }

    pub fn from_rows(ncols: usize, rows: Vec<BitVector>) -> Result<BitMatrix> {
        if let Some(r) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::LengthMismatch { expected: ncols, found: r.len() });
        }
        Ok(BitMatrix { ncols, rows })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.rows[i].set(j, v)
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_indices(self.nrows(), (0..self.nrows()).filter(|&i| self.get(i, j)))
    }

    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.ncols);
        BitVector::from_indices(self.nrows(), (0..self.nrows()).filter(|&i| self.rows[i].dot(v)))
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.ncols, other.nrows());
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVector::zeros(other.ncols);
                for k in r.ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        BitMatrix { ncols: other.ncols, rows }
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!((self.nrows(), self.ncols), (other.nrows(), other.ncols));
        BitMatrix {
            ncols: self.ncols,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.xor(b)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        EchelonBasis::from_rows(self.ncols, self.rows.iter().cloned())
            .expect("row lengths checked")
            .rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.nrows() == self.ncols && self.rank() == self.ncols
    }

    /// Basis of `{ v : M v = 0 }`.
    pub fn nullspace(&self) -> Vec<BitVector> {
        nullspace_of(&EchelonBasis::from_rows(self.ncols, self.rows.iter().cloned()).expect("row lengths checked"))
    }
}

/// Basis of the vectors orthogonal to every row of `b`.
///
/// Each free column `f` gives the vector with a one at `f` and, for every
/// pivot `p`, the entry of row `p` at `f`.
pub(crate) fn nullspace_of(b: &EchelonBasis) -> Vec<BitVector> {
    let n = b.ncols();
    (0..n)
        .filter(|&f| !b.is_pivot(f))
        .map(|f| {
            let mut v = BitVector::unit(n, f);
            for (r, &p) in b.rows().iter().zip(b.pivots()) {
                if r.get(f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nullspace_is_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (r, c) = (rng.gen_range(1..20), rng.gen_range(1..40));
            let rows = (0..r)
                .map(|_| BitVector::from_indices(c, (0..c).filter(|_| rng.gen_bool(0.3))))
                .collect();
            let m = BitMatrix::from_rows(c, rows).unwrap();
            let ker = m.nullspace();
            assert_eq!(ker.len() + m.rank(), c);
            for v in &ker {
                assert!(m.mul_vec(v).is_zero());
            }
            assert_eq!(BitMatrix::from_columns(c, &ker).rank(), ker.len());
        }
    }

    #[test]
    fn products() {
        let a = BitMatrix::from_rows(2, vec![BitVector::from_indices(2, [0, 1]), BitVector::from_indices(2, [1])]).unwrap();
        assert_eq!(a.mul(&a), BitMatrix::identity(2));
        assert!(a.is_invertible());
        assert_eq!(a.mul(&BitMatrix::identity(2)), a);
        assert_eq!(a.column(1), BitVector::from_indices(2, [0, 1]));
        assert_eq!(a.add(&a), BitMatrix::zeros(2, 2));
    }
}
