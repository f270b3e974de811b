use std::fmt;

use crate::error::{Error, Result};

/// A packed vector over `F_2`, 64 coordinates per word, bit `i % 64` of word
/// `i / 64` holding coordinate `i`. Padding bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVector {
    pub fn zeros(len: usize) -> BitVector {
        BitVector { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, i: usize) -> BitVector {
        let mut v = BitVector::zeros(len);
        v.set(i, true);
        v
    }

    /// Sets every listed coordinate, toggling on repeats.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> BitVector {
        let mut v = BitVector::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn from_words(len: usize, words: Vec<u64>) -> Result<BitVector> {
        if words.len() != words_for(len) {
            return Err(Error::LengthMismatch { expected: words_for(len), found: words.len() });
        }
        let v = BitVector { len, words };
        if !v.padding_is_clear() {
            return Err(Error::InvalidInput("nonzero padding bits".into()));
        }
        Ok(v)
    }

    pub(crate) fn padding_is_clear(&self) -> bool {
        let r = self.len % 64;
        r == 0 || self.words.last().is_none_or(|&w| w >> r == 0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len);
        xor_words(&mut self.words, &other.words);
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn highest_set_bit(&self) -> Option<usize> {
        highest_bit(&self.words)
    }

    /// Set coordinates, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Inner product over `F_2`.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }
}

/// XOR `src` into the prefix of `dst` of the same length.
#[inline]
pub(crate) fn xor_words(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
pub(crate) fn highest_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .rposition(|&w| w != 0)
        .map(|wi| wi * 64 + 63 - words[wi].leading_zeros() as usize)
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let mut v = BitVector::zeros(130);
        assert!(v.is_zero());
        v.set(129, true);
        v.flip(3);
        assert_eq!(v.highest_set_bit(), Some(129));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![3, 129]);
        assert_eq!(v.count_ones(), 2);
        assert!(v.padding_is_clear());
        let w = BitVector::from_indices(130, [3, 5, 5, 7]);
        assert_eq!(w.ones().collect::<Vec<_>>(), vec![3, 7]);
        assert!(v.dot(&w));
        assert!(BitVector::from_words(3, vec![0b1000]).is_err());
        assert!(BitVector::from_words(3, vec![0b100]).is_ok());
    }
}
