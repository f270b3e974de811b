//! Binary cache format for echelon bases.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "HITQ"                       4 bytes
//! version                      u32
//! k, n, ncols, nrows           u64 each
//! omega length L               u64 (0 when no weight vector is attached)
//! omega entries                L x u16
//! rows                         nrows x ceil(ncols/64) x u64
//! checksum                     u64, XXH64 (seed 0) of every preceding byte
//! ```

use std::io::Write;

use xxhash_rust::xxh64::xxh64;

use crate::error::{Error, Result};
use crate::monomial::WeightVector;

use super::bitvec::{words_for, BitVector};
use super::echelon::EchelonBasis;

pub const MAGIC: &[u8; 4] = b"HITQ";
pub const FORMAT_VERSION: u32 = 1;

/// A cached basis together with the stratum it belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub k: u64,
    pub n: u64,
    pub omega: Option<WeightVector>,
    pub basis: EchelonBasis,
}

pub fn serialize(entry: &CacheEntry) -> Vec<u8> {
    let b = &entry.basis;
    let nw = words_for(b.ncols());
    let mut out = Vec::with_capacity(64 + b.rank() * nw * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for x in [entry.k, entry.n, b.ncols() as u64, b.rank() as u64] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    let omega = entry.omega.as_ref().map(|w| w.entries()).unwrap_or(&[]);
    out.extend_from_slice(&(omega.len() as u64).to_le_bytes());
    for &w in omega {
        out.extend_from_slice(&(w as u16).to_le_bytes());
    }
    for r in b.rows() {
        for w in r.words() {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }
    let sum = xxh64(&out, 0);
    out.extend_from_slice(&sum.to_le_bytes());
    out
}

pub fn write_to(path: &std::path::Path, entry: &CacheEntry) -> Result<()> {
    let bytes = serialize(entry);
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(tmp, path)?;
    Ok(())
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptCache(msg.into())
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| corrupt("truncated"))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn deserialize(bytes: &[u8]) -> Result<CacheEntry> {
    if bytes.len() < 4 + 4 + 5 * 8 + 8 {
        return Err(corrupt("truncated header"));
    }
    if &bytes[..4] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported format version {version}")));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
    if xxh64(body, 0) != stored {
        return Err(corrupt("checksum mismatch"));
    }
    let mut r = Reader { bytes: body, at: 8 };
    let k = r.u64()?;
    let n = r.u64()?;
    let ncols = usize::try_from(r.u64()?).map_err(|_| corrupt("column count overflow"))?;
    let nrows = usize::try_from(r.u64()?).map_err(|_| corrupt("row count overflow"))?;
    let olen = usize::try_from(r.u64()?).map_err(|_| corrupt("weight length overflow"))?;
    if olen > 64 {
        return Err(corrupt("weight vector too long"));
    }
    let mut entries = Vec::with_capacity(olen);
    for _ in 0..olen {
        let b = r.take(2)?;
        entries.push(u16::from_le_bytes([b[0], b[1]]) as u32);
    }
    let omega = (olen > 0).then(|| WeightVector::new(entries));
    let nw = words_for(ncols);
    let expected = nrows.checked_mul(nw).and_then(|x| x.checked_mul(8));
    if expected != Some(body.len() - r.at) {
        return Err(corrupt("row payload has the wrong length"));
    }
    let mut rows = Vec::with_capacity(nrows);
    for _ in 0..nrows {
        let words = (0..nw).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        rows.push(BitVector::from_words(ncols, words).map_err(|_| corrupt("nonzero padding bits"))?);
    }
    let basis = EchelonBasis::from_reduced_rows(ncols, rows).map_err(|e| corrupt(e.to_string()))?;
    Ok(CacheEntry { k, n, omega, basis })
}

pub fn read_from(path: &std::path::Path) -> Result<CacheEntry> {
    deserialize(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_entry(seed: u64, ncols: usize, nrows: usize) -> CacheEntry {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sp = super::super::SparseEliminator::new(ncols);
        for _ in 0..nrows {
            sp.push((0..5).map(|_| rng.gen_range(0..ncols as u32)).collect());
        }
        CacheEntry {
            k: 5,
            n: 24,
            omega: Some("4,4,3".parse().unwrap()),
            basis: sp.finish().to_reduced().unwrap(),
        }
    }

    #[test]
    fn empty_roundtrip() {
        let e = CacheEntry { k: 1, n: 0, omega: None, basis: EchelonBasis::new(0) };
        assert_eq!(deserialize(&serialize(&e)).unwrap(), e);
        let e = CacheEntry { k: 2, n: 7, omega: None, basis: EchelonBasis::new(77) };
        assert_eq!(deserialize(&serialize(&e)).unwrap(), e);
    }

    #[test]
    fn large_roundtrip() {
        let e = random_entry(1, 3000, 1000);
        assert!(e.basis.rank() > 900);
        assert_eq!(deserialize(&serialize(&e)).unwrap(), e);
    }

    #[test]
    fn header_layout() {
        let e = random_entry(2, 70, 10);
        let bytes = serialize(&e);
        assert_eq!(&bytes[..4], b"HITQ");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[24..32].try_into().unwrap()), 70);
        assert_eq!(bytes.len(), 4 + 4 + 5 * 8 + 3 * 2 + e.basis.rank() * 2 * 8 + 8);
    }

    #[test]
    fn corruption_detected() {
        let e = random_entry(3, 200, 50);
        let bytes = serialize(&e);
        let mut flipped = bytes.clone();
        let mid = bytes.len() / 2;
        flipped[mid] ^= 0x10;
        assert!(matches!(deserialize(&flipped), Err(Error::CorruptCache(_))));
        assert!(matches!(deserialize(&bytes[..bytes.len() - 3]), Err(Error::CorruptCache(_))));
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(deserialize(&magic), Err(Error::CorruptCache(_))));
        let mut ver = bytes.clone();
        ver[4] = 9;
        assert!(matches!(deserialize(&ver), Err(Error::CorruptCache(_))));
    }

    #[test]
    fn padding_bits_rejected() {
        let e = CacheEntry { k: 1, n: 1, omega: None, basis: EchelonBasis::full(3) };
        let mut bytes = serialize(&e);
        let body = bytes.len() - 8;
        // first row word: set a bit past column 3
        let row0 = 4 + 4 + 5 * 8;
        bytes[row0] |= 0x80;
        let sum = xxh64(&bytes[..body], 0);
        bytes[body..].copy_from_slice(&sum.to_le_bytes());
        assert!(matches!(deserialize(&bytes), Err(Error::CorruptCache(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn roundtrip(seed in any::<u64>(), ncols in 1usize..400, nrows in 0usize..300) {
            let e = random_entry(seed, ncols, nrows);
            prop_assert_eq!(deserialize(&serialize(&e)).unwrap(), e);
        }
    }
}
