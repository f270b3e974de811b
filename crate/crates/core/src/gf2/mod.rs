//! Linear algebra over `F_2`: packed vectors, reduced echelon bases, a sparse
//! bucket eliminator for large generator streams, small dense matrices, and
//! the on-disk cache format.

mod bitvec;
pub mod cache;
mod echelon;
mod matrix;
mod rank;
mod sparse;

pub use bitvec::BitVector;
pub use echelon::{EchelonBasis, InsertOutcome};
pub use matrix::BitMatrix;
pub use rank::sparse_rank;
pub use sparse::{SparseEchelon, SparseEliminator};

pub(crate) use bitvec::{words_for, xor_words};
pub(crate) use matrix::nullspace_of;
