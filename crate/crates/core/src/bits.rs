//! Packed binary strings and sorted position sets.
//!
//! Bit `i` of a [`BitString`] lives in word `i / 64` at bit `i % 64`; bits past
//! `len` are always zero, so equality and hashing work on whole words.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut out = BitString { len, words: vec![u64::MAX; words_for(len)] };
        out.clear_padding();
        out
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut out = BitString { len, words: (0..words_for(len)).map(|_| rng.gen()).collect() };
        out.clear_padding();
        out
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        bits.iter().copied().collect()
    }

    /// Low `len` bits of `value`, bit 0 first. `len` may not exceed 64.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 takes at most 64 bits");
        let mut out = BitString { len, words: if len == 0 { vec![] } else { vec![value] } };
        out.clear_padding();
        out
    }

    /// Inverse of [`BitString::from_u64`]; `None` when longer than 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=WORD => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> Result<bool> {
        if index >= self.len {
            return Err(Error::IndexOutOfRange { index, len: self.len });
        }
        Ok(self.bit(index))
    }

    pub fn set(&mut self, index: usize, value: bool) -> Result<()> {
        if index >= self.len {
            return Err(Error::IndexOutOfRange { index, len: self.len });
        }
        let mask = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
        Ok(())
    }

    pub fn flip(&mut self, index: usize) -> Result<()> {
        if index >= self.len {
            return Err(Error::IndexOutOfRange { index, len: self.len });
        }
        self.words[index / WORD] ^= 1u64 << (index % WORD);
        Ok(())
    }

    #[inline]
    pub(crate) fn bit(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    /// Positions holding a one, in increasing order.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * WORD + tz)
            })
        })
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check_same_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { left: self.len, right: other.len });
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitString) -> Result<()> {
        self.check_same_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn hamming(&self, other: &BitString) -> Result<usize> {
        self.check_same_len(other)?;
        Ok(self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum())
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitString) -> Result<bool> {
        self.check_same_len(other)?;
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        Ok(ones & 1 == 1)
    }

    /// `x^S`: the bits at the positions of `set`, in increasing position order.
    pub fn restrict(&self, set: &IndexSet) -> Result<BitString> {
        if set.ground() != self.len {
            return Err(Error::GroundMismatch { left: set.ground(), right: self.len });
        }
        Ok(set.indices().iter().map(|&i| self.bit(i)).collect())
    }

    /// `len` consecutive bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> Result<BitString> {
        let end = start.checked_add(len).filter(|&e| e <= self.len).ok_or(Error::IndexOutOfRange {
            index: start.saturating_add(len),
            len: self.len,
        })?;
        let mut out = BitString::zeros(len);
        if len == 0 {
            return Ok(out);
        }
        let shift = start % WORD;
        let first = start / WORD;
        for (k, word) in out.words.iter_mut().enumerate() {
            let lo = self.words[first + k] >> shift;
            let hi = if shift == 0 {
                0
            } else {
                self.words.get(first + k + 1).map_or(0, |w| w << (WORD - shift))
            };
            *word = lo | hi;
        }
        out.clear_padding();
        debug_assert!(end <= self.len);
        Ok(out)
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a BitString>>(parts: I) -> BitString {
        parts.into_iter().flat_map(|p| p.iter()).collect()
    }

    /// Packed bytes, bit 0 is the least significant bit of the first byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        self.words.iter().flat_map(|w| w.to_le_bytes()).take(nbytes).collect()
    }

    pub fn from_bytes(len: usize, bytes: &[u8]) -> Result<BitString> {
        let nbytes = len.div_ceil(8);
        if bytes.len() != nbytes {
            return Err(Error::LengthMismatch { left: bytes.len(), right: nbytes });
        }
        let mut words = vec![0u64; words_for(len)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        let mut out = BitString { len, words };
        out.clear_padding();
        Ok(out)
    }

    /// Raw dump: 8-byte little-endian bit length followed by the packed bytes.
    pub fn to_raw(&self) -> Vec<u8> {
        let mut out = (self.len as u64).to_le_bytes().to_vec();
        out.extend(self.to_bytes());
        out
    }

    /// Parses one raw dump from the front of `bytes`, returning the rest.
    pub fn from_raw(bytes: &[u8]) -> Result<(BitString, &[u8])> {
        let header: [u8; 8] = bytes
            .get(..8)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| Error::Frame("raw dump shorter than its header".into()))?;
        let len = usize::try_from(u64::from_le_bytes(header))
            .map_err(|_| Error::Frame("raw length overflows".into()))?;
        let nbytes = len.div_ceil(8);
        let body = bytes
            .get(8..8 + nbytes)
            .ok_or_else(|| Error::Frame("raw dump truncated".into()))?;
        Ok((BitString::from_bytes(len, body)?, &bytes[8 + nbytes..]))
    }

    fn clear_padding(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in iter {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1u64 << (len % WORD);
            }
            len += 1;
        }
        BitString { len, words }
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses `"1011"` as bits 0, 1, 2, 3 in reading order.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Frame(format!("invalid bit character {c:?}"))),
            })
            .collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(len={}, weight={})", self.len, self.weight())
        }
    }
}

impl Ord for BitString {
    /// Lexicographic on the bit sequence starting at bit 0; a proper prefix
    /// sorts first.
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let first_diff = (a ^ b).trailing_zeros();
                return if (a >> first_diff) & 1 == 0 { Ordering::Less } else { Ordering::Greater };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A subset of `0..ground`, kept as a strictly increasing list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    ground: usize,
    indices: Vec<usize>,
}

impl IndexSet {
    pub fn new(ground: usize, indices: Vec<usize>) -> Result<Self> {
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        if !increasing || indices.last().is_some_and(|&i| i >= ground) {
            return Err(Error::MalformedIndexSet);
        }
        Ok(IndexSet { ground, indices })
    }

    /// Sorts and deduplicates before validating the range.
    pub fn from_unsorted(ground: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        IndexSet::new(ground, indices)
    }

    pub fn full(ground: usize) -> Self {
        IndexSet { ground, indices: (0..ground).collect() }
    }

    pub fn empty(ground: usize) -> Self {
        IndexSet { ground, indices: Vec::new() }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Rank of `index` within the set.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.indices.binary_search(&index).ok()
    }

    pub fn intersect(&self, other: &IndexSet) -> Result<IndexSet> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch { left: self.ground, right: other.ground });
        }
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push(self.indices[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(IndexSet { ground: self.ground, indices: out })
    }

    /// Maps a subset of `0..self.len()` to the absolute positions it selects.
    pub fn select(&self, relative: &IndexSet) -> Result<IndexSet> {
        if relative.ground != self.len() {
            return Err(Error::GroundMismatch { left: relative.ground, right: self.len() });
        }
        let indices = relative.indices.iter().map(|&j| self.indices[j]).collect();
        Ok(IndexSet { ground: self.ground, indices })
    }

    /// Inverse of [`IndexSet::select`]: positions of `subset` within `self`.
    pub fn relative(&self, subset: &IndexSet) -> Result<IndexSet> {
        if subset.ground != self.ground {
            return Err(Error::GroundMismatch { left: subset.ground, right: self.ground });
        }
        let indices = subset
            .indices
            .iter()
            .map(|&i| self.position(i).ok_or(Error::IndexOutOfRange { index: i, len: self.ground }))
            .collect::<Result<Vec<_>>>()?;
        Ok(IndexSet { ground: self.len(), indices })
    }
}
