//! Short binary linear codes in parity-check form, and the syndrome-based
//! fuzzy extractor built on them.
//!
//! Codes are at most 24 bits long, so every structural claim (unique
//! syndromes up to the radius, minimum distance) is certified exhaustively
//! when the code is constructed.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hashing::{strong_extract, ExtractorSeed};

pub const MAX_CODE_LENGTH: usize = 24;
/// Redundancy up to which a full coset-leader table is kept.
const FULL_TABLE_REDUNDANCY: usize = 20;

#[derive(Debug)]
enum SyndromeTable {
    /// Coset leader for every syndrome, indexed by syndrome value.
    Full(Vec<u32>),
    /// Only patterns of weight at most the radius.
    WithinRadius(HashMap<u32, u32>),
}

#[derive(Clone)]
pub struct LinearCode {
    name: String,
    length: usize,
    dimension: usize,
    rows: Vec<BitString>,
    /// Syndrome of the unit vector `e_j`, row `i` at bit `i`.
    columns: Vec<u32>,
    radius: usize,
    min_distance: Option<usize>,
    table: Arc<SyndromeTable>,
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearCode")
            .field("name", &self.name)
            .field("length", &self.length)
            .field("dimension", &self.dimension)
            .field("radius", &self.radius)
            .finish()
    }
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.length == other.length && self.rows == other.rows
    }
}

/// Outcome of syndrome decoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoding {
    /// The unique error pattern of weight at most the radius.
    Corrected(BitString),
    /// A minimum-weight pattern beyond the radius; possibly a miscorrection.
    LowConfidence(BitString),
    Failed,
}

/// Calls `f` on every `length`-bit pattern of the given weight (Gosper's hack).
pub(crate) fn for_each_pattern(length: usize, weight: usize, mut f: impl FnMut(u32) -> bool) {
    if weight > length {
        return;
    }
    if weight == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << length;
    let mut v: u64 = (1u64 << weight) - 1;
    while v < limit {
        if !f(v as u32) {
            return;
        }
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
}

fn gf2_rank(mut rows: Vec<u32>) -> usize {
    let mut rank = 0;
    for bit in 0..32 {
        let mask = 1u32 << bit;
        if let Some(p) = (rank..rows.len()).find(|&i| rows[i] & mask != 0) {
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && *row & mask != 0 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

impl LinearCode {
    /// Builds a code from the rows of its parity-check matrix and certifies
    /// its correction radius by enumeration.
    pub fn from_parity_check(name: impl Into<String>, length: usize, rows: Vec<BitString>) -> Result<Self> {
        if length == 0 || length > MAX_CODE_LENGTH {
            return Err(Error::InvalidCode(format!("length {length} outside 1..={MAX_CODE_LENGTH}")));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != length) {
            return Err(Error::InvalidCode(format!("row of length {} in a length-{length} code", bad.len())));
        }
        let redundancy = rows.len();
        if redundancy >= length {
            return Err(Error::InvalidCode("code must have positive dimension".into()));
        }
        let packed: Vec<u32> = rows.iter().map(|r| r.to_u64().unwrap() as u32).collect();
        if gf2_rank(packed) != redundancy {
            return Err(Error::InvalidCode("parity-check matrix is not full rank".into()));
        }
        let columns: Vec<u32> = (0..length)
            .map(|j| rows.iter().enumerate().fold(0u32, |acc, (i, r)| acc | ((r.bit(j) as u32) << i)))
            .collect();
        let syndrome_of = |pattern: u32| -> u32 {
            let mut s = 0;
            let mut rest = pattern;
            while rest != 0 {
                s ^= columns[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            s
        };

        // Minimum distance: the fewest columns summing to zero.
        let mut min_distance = None;
        'weights: for w in 1..=length {
            let mut found = false;
            for_each_pattern(length, w, |p| {
                found = syndrome_of(p) == 0;
                !found
            });
            if found {
                min_distance = Some(w);
                break 'weights;
            }
        }

        // Enumerate patterns by weight; the radius is one below the first
        // weight at which a syndrome repeats.
        let full = redundancy <= FULL_TABLE_REDUNDANCY;
        let mut seen: HashMap<u32, u32> = HashMap::new();
        let mut leaders = if full { vec![u32::MAX; 1 << redundancy] } else { Vec::new() };
        let mut filled = 0usize;
        let mut radius = None;
        for w in 0..=length {
            let mut collided = false;
            for_each_pattern(length, w, |p| {
                let s = syndrome_of(p);
                if full {
                    if leaders[s as usize] == u32::MAX {
                        leaders[s as usize] = p;
                        filled += 1;
                    } else {
                        collided = true;
                    }
                } else if radius.is_none()
                    && seen.insert(s, p).is_some() {
                        collided = true;
                    }
                true
            });
            if collided && radius.is_none() {
                radius = Some(w - 1);
            }
            let done_radius = radius.is_some();
            let done_table = !full || filled == leaders.len();
            if done_radius && done_table {
                break;
            }
        }
        // Without any collision every pattern is distinct: only possible when
        // the code has a single codeword per syndrome, i.e. never for k ≥ 1.
        let radius = radius.unwrap_or(length);
        let table = if full {
            SyndromeTable::Full(leaders)
        } else {
            seen.retain(|_, p| p.count_ones() as usize <= radius);
            SyndromeTable::WithinRadius(seen)
        };
        Ok(LinearCode {
            name: name.into(),
            length,
            dimension: length - redundancy,
            rows,
            columns,
            radius,
            min_distance,
            table: Arc::new(table),
        })
    }

    /// The [7,4] Hamming code; column `j` of `H` is `j + 1` in binary.
    pub fn hamming74() -> Self {
        let rows = (0..3).map(|i| (0..7).map(|j| ((j + 1) >> i) & 1 == 1).collect()).collect();
        LinearCode::from_parity_check("hamming74", 7, rows).expect("valid code")
    }

    /// Length-`len` repetition code, one information bit.
    pub fn repetition(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidCode("repetition code needs length ≥ 2".into()));
        }
        let rows = (0..len - 1).map(|i| (0..len).map(|j| j == i || j == i + 1).collect()).collect();
        LinearCode::from_parity_check(format!("repetition{len}"), len, rows)
    }

    /// The trivial rate-1 code: no redundancy, radius 0.
    pub fn identity(len: usize) -> Result<Self> {
        LinearCode::from_parity_check(format!("identity{len}"), len, Vec::new())
    }

    /// A uniformly random full-rank parity-check matrix.
    pub fn random<R: Rng + ?Sized>(length: usize, dimension: usize, rng: &mut R) -> Result<Self> {
        if dimension == 0 || dimension >= length || length > 20 {
            return Err(Error::InvalidCode("random codes need 0 < k_c < ℓ_c ≤ 20".into()));
        }
        loop {
            let rows: Vec<BitString> = (0..length - dimension).map(|_| BitString::random(length, rng)).collect();
            let packed: Vec<u32> = rows.iter().map(|r| r.to_u64().unwrap() as u32).collect();
            if gf2_rank(packed) == rows.len() {
                return LinearCode::from_parity_check(format!("random{length}x{dimension}"), length, rows);
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Syndrome length `ℓ_c − k_c`.
    pub fn redundancy(&self) -> usize {
        self.length - self.dimension
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn min_distance(&self) -> Option<usize> {
        self.min_distance
    }

    pub fn rate(&self) -> f64 {
        self.dimension as f64 / self.length as f64
    }

    pub fn parity_check(&self) -> &[BitString] {
        &self.rows
    }

    pub fn syndrome(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.length {
            return Err(Error::LengthMismatch { left: x.len(), right: self.length });
        }
        let s = x.ones_positions().fold(0u32, |acc, j| acc ^ self.columns[j]);
        Ok(BitString::from_u64(s as u64, self.redundancy()))
    }

    pub fn decode_syndrome(&self, s: &BitString) -> Result<Decoding> {
        if s.len() != self.redundancy() {
            return Err(Error::LengthMismatch { left: s.len(), right: self.redundancy() });
        }
        let key = s.to_u64().expect("redundancy ≤ 24") as u32;
        let pattern = match &*self.table {
            SyndromeTable::Full(leaders) => Some(leaders[key as usize]),
            SyndromeTable::WithinRadius(map) => map.get(&key).copied(),
        };
        Ok(match pattern {
            Some(p) => {
                let e = BitString::from_u64(p as u64, self.length);
                if p.count_ones() as usize <= self.radius {
                    Decoding::Corrected(e)
                } else {
                    Decoding::LowConfidence(e)
                }
            }
            None => Decoding::Failed,
        })
    }

    /// `(ℓ_c, k_c, radius)` as 4-byte big-endian integers, then `H` row-major,
    /// packed least-significant bit first.
    pub fn descriptor_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for v in [self.length, self.dimension, self.radius] {
            out.extend((v as u32).to_be_bytes());
        }
        out.extend(BitString::concat(&self.rows).to_bytes());
        out
    }

    pub fn from_descriptor(bytes: &[u8]) -> Result<Self> {
        let word = |i: usize| -> Result<usize> {
            bytes
                .get(4 * i..4 * i + 4)
                .map(|b| u32::from_be_bytes(b.try_into().unwrap()) as usize)
                .ok_or_else(|| Error::InvalidCode("descriptor truncated".into()))
        };
        let (length, dimension, radius) = (word(0)?, word(1)?, word(2)?);
        if length == 0 || length > MAX_CODE_LENGTH || dimension > length {
            return Err(Error::InvalidCode("descriptor dimensions out of range".into()));
        }
        let redundancy = length - dimension;
        let h = BitString::from_bytes(redundancy * length, &bytes[12..])?;
        let rows = (0..redundancy).map(|i| h.slice(i * length, length)).collect::<Result<Vec<_>>>()?;
        let code = LinearCode::from_parity_check(format!("custom{length}x{dimension}"), length, rows)?;
        if code.radius != radius {
            return Err(Error::InvalidCode(format!("declared radius {radius}, certified {}", code.radius)));
        }
        Ok(code)
    }
}

/// Named code choices accepted on the command line and in config files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeSpec {
    Hamming74,
    Repetition(usize),
    Identity(usize),
    Random { length: usize, dimension: usize, seed: u64 },
}

impl CodeSpec {
    pub fn build(&self) -> Result<LinearCode> {
        match *self {
            CodeSpec::Hamming74 => Ok(LinearCode::hamming74()),
            CodeSpec::Repetition(len) => LinearCode::repetition(len),
            CodeSpec::Identity(len) => LinearCode::identity(len),
            CodeSpec::Random { length, dimension, seed } => {
                LinearCode::random(length, dimension, &mut ChaCha20Rng::seed_from_u64(seed))
            }
        }
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.parse::<usize>().map_err(|_| Error::Config(format!("bad number in code spec {s:?}")));
        match parts.as_slice() {
            ["hamming74"] => Ok(CodeSpec::Hamming74),
            ["repetition", n] => Ok(CodeSpec::Repetition(num(n)?)),
            ["identity", n] => Ok(CodeSpec::Identity(num(n)?)),
            ["random", l, k, seed] => Ok(CodeSpec::Random {
                length: num(l)?,
                dimension: num(k)?,
                seed: seed.parse().map_err(|_| Error::Config(format!("bad seed in {s:?}")))?,
            }),
            _ => Err(Error::Config(format!("unknown code {s:?}"))),
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::Hamming74 => write!(f, "hamming74"),
            CodeSpec::Repetition(n) => write!(f, "repetition:{n}"),
            CodeSpec::Identity(n) => write!(f, "identity:{n}"),
            CodeSpec::Random { length, dimension, seed } => write!(f, "random:{length}:{dimension}:{seed}"),
        }
    }
}

/// Public output of [`FuzzyExtractor::ext`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzyOutput {
    pub y: BitString,
    /// Concatenated per-block syndromes.
    pub p: BitString,
    pub seed: ExtractorSeed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recovered {
    pub y: BitString,
    /// False when some block was decoded beyond the certified radius.
    pub confident: bool,
}

/// Syndrome sketch per code block followed by Toeplitz extraction of the
/// whole input.
#[derive(Clone, Debug)]
pub struct FuzzyExtractor {
    code: LinearCode,
    input_len: usize,
    out_len: usize,
}

impl FuzzyExtractor {
    pub fn new(code: LinearCode, input_len: usize, out_len: usize) -> Result<Self> {
        if input_len == 0 || !input_len.is_multiple_of(code.length()) {
            return Err(Error::InvalidCode(format!(
                "input length {input_len} is not a positive multiple of the code length {}",
                code.length()
            )));
        }
        if out_len == 0 {
            return Err(Error::Domain { value: 0.0, domain: "extractor output ≥ 1 bit" });
        }
        Ok(FuzzyExtractor { code, input_len, out_len })
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn blocks(&self) -> usize {
        self.input_len / self.code.length()
    }

    pub fn helper_len(&self) -> usize {
        self.blocks() * self.code.redundancy()
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn seed_len(&self) -> usize {
        self.input_len + self.out_len - 1
    }

    fn block(&self, x: &BitString, b: usize) -> Result<BitString> {
        x.slice(b * self.code.length(), self.code.length())
    }

    fn check_input(&self, x: &BitString) -> Result<()> {
        if x.len() != self.input_len {
            return Err(Error::LengthMismatch { left: x.len(), right: self.input_len });
        }
        Ok(())
    }

    pub fn ext(&self, x: &BitString, seed: &ExtractorSeed) -> Result<FuzzyOutput> {
        self.check_input(x)?;
        let syndromes = (0..self.blocks())
            .map(|b| self.code.syndrome(&self.block(x, b)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(FuzzyOutput {
            y: strong_extract(x, seed, self.out_len)?,
            p: BitString::concat(&syndromes),
            seed: seed.clone(),
        })
    }

    pub fn rec(&self, x_noisy: &BitString, seed: &ExtractorSeed, p: &BitString) -> Result<Recovered> {
        self.check_input(x_noisy)?;
        if p.len() != self.helper_len() {
            return Err(Error::LengthMismatch { left: p.len(), right: self.helper_len() });
        }
        let r = self.code.redundancy();
        let mut confident = true;
        let mut corrected = Vec::with_capacity(self.blocks());
        for b in 0..self.blocks() {
            let block = self.block(x_noisy, b)?;
            let s = self.code.syndrome(&block)?.xor(&p.slice(b * r, r)?)?;
            let error = match self.code.decode_syndrome(&s)? {
                Decoding::Corrected(e) => e,
                Decoding::LowConfidence(e) => {
                    confident = false;
                    e
                }
                Decoding::Failed => return Err(Error::DecodeFailure),
            };
            corrected.push(block.xor(&error)?);
        }
        let x_hat = BitString::concat(&corrected);
        Ok(Recovered { y: strong_extract(&x_hat, seed, self.out_len)?, confident })
    }
}
