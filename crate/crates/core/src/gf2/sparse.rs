use crate::error::Result;

use super::bitvec::{words_for, xor_words, BitVector};
use super::echelon::EchelonBasis;

const NONE: u32 = u32::MAX;

/// Gaussian elimination over sparse rows, column by column from the largest
/// column down.
///
/// Rows are bucketed by leading (largest) column. At each column the shortest
/// row in the bucket becomes the pivot row and is added to the others, which
/// move to the bucket of their new leading column. Columns below `floor` are
/// discarded on input, which computes the leading terms of the image of the
/// row space in the quotient by those coordinates.
pub struct SparseEliminator {
    ncols: usize,
    floor: usize,
    rows: Vec<Vec<u32>>,
    buckets: Vec<Vec<u32>>,
    pushed: usize,
}

impl SparseEliminator {
    pub fn new(ncols: usize) -> SparseEliminator {
        SparseEliminator::with_floor(ncols, 0)
    }

    pub fn with_floor(ncols: usize, floor: usize) -> SparseEliminator {
        let floor = floor.min(ncols);
        SparseEliminator {
            ncols,
            floor,
            rows: Vec::new(),
            buckets: vec![Vec::new(); ncols - floor],
            pushed: 0,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn floor(&self) -> usize {
        self.floor
    }

    /// Number of rows offered so far, including zero rows.
    pub fn pushed(&self) -> usize {
        self.pushed
    }

    /// Adds the row with a one in each listed column; repeated columns cancel.
    pub fn push(&mut self, mut cols: Vec<u32>) {
        self.pushed += 1;
        let floor = self.floor as u32;
        cols.retain(|&c| c >= floor);
        cols.sort_unstable_by(|a, b| b.cmp(a));
        let mut w = 0;
        let mut i = 0;
        while i < cols.len() {
            let mut j = i;
            while j < cols.len() && cols[j] == cols[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                cols[w] = cols[i];
                w += 1;
            }
            i = j;
        }
        cols.truncate(w);
        if let Some(&lead) = cols.first() {
            assert!((lead as usize) < self.ncols, "column {lead} out of range");
            let id = self.rows.len() as u32;
            self.rows.push(cols);
            self.buckets[lead as usize - self.floor].push(id);
        }
    }

    pub fn finish(mut self) -> SparseEchelon {
        let mut row_of = vec![NONE; self.ncols];
        let mut out_rows: Vec<Vec<u32>> = Vec::new();
        let mut scratch: Vec<u32> = Vec::new();
        for c in (self.floor..self.ncols).rev() {
            let bucket = std::mem::take(&mut self.buckets[c - self.floor]);
            if bucket.is_empty() {
                continue;
            }
            let (best, _) = bucket
                .iter()
                .enumerate()
                .min_by_key(|(_, &id)| (self.rows[id as usize].len(), id))
                .expect("nonempty bucket");
            let pivot_id = bucket[best];
            let pivot = std::mem::take(&mut self.rows[pivot_id as usize]);
            for &id in bucket.iter().filter(|&&id| id != pivot_id) {
                let row = std::mem::take(&mut self.rows[id as usize]);
                xor_sorted_desc(&row[1..], &pivot[1..], &mut scratch);
                if let Some(&lead) = scratch.first() {
                    self.rows[id as usize] = scratch.clone();
                    self.buckets[lead as usize - self.floor].push(id);
                }
            }
            row_of[c] = out_rows.len() as u32;
            out_rows.push(pivot);
        }
        SparseEchelon { ncols: self.ncols, floor: self.floor, row_of, rows: out_rows }
    }
}

/// Symmetric difference of two descending sorted lists.
fn xor_sorted_desc(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    out.reserve(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Greater => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Less => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Result of [`SparseEliminator::finish`]: one sparse row per pivot column,
/// each row's largest column being its pivot (semi-echelon form).
#[derive(Clone, Debug)]
pub struct SparseEchelon {
    ncols: usize,
    floor: usize,
    row_of: Vec<u32>,
    rows: Vec<Vec<u32>>,
}

impl SparseEchelon {
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Columns below this index were projected away.
    pub fn floor(&self) -> usize {
        self.floor
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn is_pivot(&self, col: usize) -> bool {
        self.row_of[col] != NONE
    }

    /// Pivot columns, ascending.
    pub fn pivots(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.is_pivot(c)).collect()
    }

    /// Columns at or above the floor that are not pivots, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        (self.floor..self.ncols).filter(|&c| !self.is_pivot(c)).collect()
    }

    /// Total number of stored entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Clears every pivot column of the packed vector `v`, producing the
    /// canonical representative of its coset. Bits below the floor are dropped.
    pub fn reduce_words(&self, v: &mut [u64]) {
        debug_assert_eq!(v.len(), words_for(self.ncols));
        let fw = self.floor / 64;
        for w in v.iter_mut().take(fw) {
            *w = 0;
        }
        if self.floor % 64 != 0 {
            v[fw] &= !((1u64 << (self.floor % 64)) - 1);
        }
        for wi in (0..v.len()).rev() {
            let mut bits = v[wi];
            while bits != 0 {
                let b = 63 - bits.leading_zeros() as usize;
                let c = wi * 64 + b;
                let r = self.row_of[c];
                if r != NONE {
                    for &x in &self.rows[r as usize] {
                        v[x as usize / 64] ^= 1u64 << (x % 64);
                    }
                }
                bits = v[wi] & ((1u64 << b) - 1);
            }
        }
    }

    pub fn reduce_vector(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.ncols);
        let mut out = v.clone();
        self.reduce_words(out.words_mut());
        out
    }

    /// Sparse copy of a reduced basis.
    pub fn from_basis(b: &EchelonBasis) -> SparseEchelon {
        let mut row_of = vec![NONE; b.ncols()];
        let mut rows = Vec::with_capacity(b.rank());
        for (r, &p) in b.rows().iter().zip(b.pivots()) {
            row_of[p] = rows.len() as u32;
            let mut cols: Vec<u32> = r.ones().map(|c| c as u32).collect();
            cols.reverse();
            rows.push(cols);
        }
        SparseEchelon { ncols: b.ncols(), floor: 0, row_of, rows }
    }

    /// The reduced echelon basis of the same row space.
    pub fn to_reduced(&self) -> Result<EchelonBasis> {
        let n = self.ncols;
        let nw = words_for(n);
        let mut reduced: Vec<BitVector> = Vec::with_capacity(self.rows.len());
        let mut mask = vec![0u64; nw];
        let mut reduced_of = vec![NONE; n];
        for p in 0..n {
            let r = self.row_of[p];
            if r == NONE {
                continue;
            }
            let mut d = BitVector::from_indices(n, self.rows[r as usize].iter().map(|&c| c as usize));
            {
                let words = d.words_mut();
                let top = p / 64 + 1;
                for wi in 0..top {
                    let mut m = words[wi] & mask[wi];
                    while m != 0 {
                        let b = m.trailing_zeros() as usize;
                        m &= m - 1;
                        let row = &reduced[reduced_of[wi * 64 + b] as usize];
                        let t = wi + 1;
                        xor_words(&mut words[..t], &row.words()[..t]);
                    }
                }
            }
            mask[p / 64] |= 1u64 << (p % 64);
            reduced_of[p] = reduced.len() as u32;
            reduced.push(d);
        }
        EchelonBasis::from_reduced_rows(n, reduced)
    }
}
