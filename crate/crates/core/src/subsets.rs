//! Colexicographic ranking of ℓ-subsets and the dense injective encoding of
//! (subset, copy index) pairs into m-bit strings.

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::bits::{BitString, IndexSet};
use crate::error::{Error, Result};

/// Pascal's triangle truncated to columns `0..=ell`.
fn binomial_table(k: usize, ell: usize) -> Vec<Vec<BigUint>> {
    let mut table = vec![vec![BigUint::zero(); ell + 1]; k + 1];
    for n in 0..=k {
        table[n][0] = BigUint::one();
        for r in 1..=ell.min(n) {
            table[n][r] = &table[n - 1][r - 1] + &table[n - 1][r];
        }
    }
    table
}

pub fn binomial(n: usize, r: usize) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    (0..r).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Number of bits needed to hold every value below `count`.
pub fn bits_for(count: &BigUint) -> usize {
    if count <= &BigUint::one() {
        0
    } else {
        (count - 1u32).bits() as usize
    }
}

/// Little-endian bit expansion of `value` into exactly `len` bits.
pub fn biguint_to_bits(value: &BigUint, len: usize) -> Result<BitString> {
    if value.bits() as usize > len {
        return Err(Error::LengthMismatch { left: value.bits() as usize, right: len });
    }
    Ok((0..len).map(|i| value.bit(i as u64)).collect())
}

pub fn bits_to_biguint(bits: &BitString) -> BigUint {
    let mut value = BigUint::zero();
    for i in bits.ones_positions() {
        value.set_bit(i as u64, true);
    }
    value
}

/// Ranker for ℓ-subsets of `[k]` in colex order: `rank(s) = Σ_i C(s_i, i+1)`.
#[derive(Clone, Debug)]
pub struct Combinadic {
    k: usize,
    ell: usize,
    table: Vec<Vec<BigUint>>,
}

impl Combinadic {
    pub fn new(k: usize, ell: usize) -> Result<Self> {
        if ell > k {
            return Err(Error::SubsetSize { got: ell, expected: k });
        }
        Ok(Combinadic { k, ell, table: binomial_table(k, ell) })
    }

    pub fn count(&self) -> &BigUint {
        &self.table[self.k][self.ell]
    }

    pub fn rank(&self, s: &IndexSet) -> Result<BigUint> {
        if s.ground() != self.k {
            return Err(Error::GroundMismatch { left: s.ground(), right: self.k });
        }
        if s.len() != self.ell {
            return Err(Error::SubsetSize { got: s.len(), expected: self.ell });
        }
        Ok(s.indices().iter().enumerate().map(|(i, &v)| &self.table[v][i + 1]).sum())
    }

    pub fn unrank(&self, rank: &BigUint) -> Result<IndexSet> {
        if rank >= self.count() {
            return Err(Error::RankOutOfRange);
        }
        let mut rest = rank.clone();
        let mut out = vec![0; self.ell];
        let mut ceiling = self.k;
        for i in (1..=self.ell).rev() {
            // Largest c below the previous element with C(c, i) ≤ rest.
            let c = (i - 1..ceiling).rev().find(|&c| self.table[c][i] <= rest).expect("rank below count");
            rest -= &self.table[c][i];
            out[i - 1] = c;
            ceiling = c;
        }
        IndexSet::new(self.k, out)
    }
}

pub fn rank(k: usize, ell: usize, s: &IndexSet) -> Result<BigUint> {
    Combinadic::new(k, ell)?.rank(s)
}

pub fn unrank(k: usize, ell: usize, r: &BigUint) -> Result<IndexSet> {
    Combinadic::new(k, ell)?.unrank(r)
}

/// Injective map `(s, j) ↦ rank(s) + j·C(k,ℓ)` into `m`-bit strings, with
/// `j < t_m = ⌊2^m / C(k,ℓ)⌋`.
#[derive(Clone, Debug)]
pub struct DenseCode {
    m: usize,
    ranker: Combinadic,
    t_m: BigUint,
}

impl DenseCode {
    pub fn new(k: usize, ell: usize, m: usize) -> Result<Self> {
        let ranker = Combinadic::new(k, ell)?;
        let needed = bits_for(ranker.count());
        if m < needed {
            return Err(Error::Infeasible(format!("m ≥ ⌈log C(k,ℓ)⌉ = {needed}")));
        }
        let t_m = (BigUint::one() << m) / ranker.count();
        Ok(DenseCode { m, ranker, t_m })
    }

    pub fn k(&self) -> usize {
        self.ranker.k
    }

    pub fn ell(&self) -> usize {
        self.ranker.ell
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn count(&self) -> &BigUint {
        self.ranker.count()
    }

    pub fn copies(&self) -> &BigUint {
        &self.t_m
    }

    /// Number of valid codewords, `t_m · C(k,ℓ)`.
    pub fn image_size(&self) -> BigUint {
        &self.t_m * self.count()
    }

    pub fn ranker(&self) -> &Combinadic {
        &self.ranker
    }

    pub fn random_copy<R: Rng + ?Sized>(&self, rng: &mut R) -> BigUint {
        rng.gen_biguint_below(&self.t_m)
    }

    pub fn encode(&self, s: &IndexSet, copy: &BigUint) -> Result<BitString> {
        if copy >= &self.t_m {
            return Err(Error::CopyOutOfRange);
        }
        let value = self.ranker.rank(s)? + copy * self.count();
        biguint_to_bits(&value, self.m)
    }

    /// Inverse of [`encode`](Self::encode); `None` for strings outside the image.
    pub fn decode(&self, w: &BitString) -> Result<Option<(IndexSet, BigUint)>> {
        if w.len() != self.m {
            return Err(Error::LengthMismatch { left: w.len(), right: self.m });
        }
        let value = bits_to_biguint(w);
        if value >= self.image_size() {
            return Ok(None);
        }
        let copy = &value / self.count();
        let r = value % self.count();
        Ok(Some((self.ranker.unrank(&r)?, copy)))
    }

    /// Fraction of `m`-bit strings outside the image.
    pub fn invalid_fraction(&self) -> f64 {
        let total = BigUint::one() << self.m;
        let invalid = &total - self.image_size();
        // Scale both down to f64 range together.
        let shift = self.m.saturating_sub(60);
        let num = (invalid >> shift).to_f64().unwrap_or(f64::INFINITY);
        let den = (total >> shift).to_f64().unwrap_or(f64::INFINITY);
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn all_subsets(k: usize, ell: usize) -> Vec<Vec<usize>> {
        (0u32..1 << k)
            .filter(|v| v.count_ones() as usize == ell)
            .map(|v| (0..k).filter(|i| v >> i & 1 == 1).collect())
            .collect()
    }

    fn set(k: usize, v: &[usize]) -> IndexSet {
        IndexSet::new(k, v.to_vec()).unwrap()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(4, 5), BigUint::zero());
        assert_eq!(binomial(60, 30), BigUint::from(118264581564861424u64));
        let table = binomial_table(20, 6);
        for n in 0..=20 {
            for r in 0..=6 {
                assert_eq!(table[n][r], binomial(n, r));
            }
        }
    }

    #[test]
    fn rank_endpoints() {
        let c = Combinadic::new(9, 3).unwrap();
        assert_eq!(c.rank(&set(9, &[0, 1, 2])).unwrap(), BigUint::zero());
        let last = c.count() - 1u32;
        assert_eq!(c.unrank(&last).unwrap(), set(9, &[6, 7, 8]));
        assert_eq!(c.unrank(c.count()), Err(Error::RankOutOfRange));
        assert!(c.rank(&set(9, &[0, 1])).is_err());
        assert!(c.rank(&set(8, &[0, 1, 2])).is_err());
    }

    #[test]
    fn ranks_follow_brute_force_colex_order() {
        let mut subsets = all_subsets(5, 2);
        // colex: compare by largest element first
        subsets.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        assert_eq!(subsets.len(), 10);
        for (expected, s) in subsets.iter().enumerate() {
            assert_eq!(rank(5, 2, &set(5, s)).unwrap(), BigUint::from(expected));
            assert_eq!(unrank(5, 2, &BigUint::from(expected)).unwrap(), set(5, s));
        }
    }

    #[test]
    fn small_dense_code() {
        let dc = DenseCode::new(4, 2, 3).unwrap();
        assert_eq!(dc.count(), &BigUint::from(6u32));
        assert_eq!(dc.copies(), &BigUint::one());
        for v in 0..8u64 {
            let decoded = dc.decode(&BitString::from_u64(v, 3)).unwrap();
            assert_eq!(decoded.is_some(), v < 6, "value {v}");
        }
        let first = dc.decode(&BitString::zeros(3)).unwrap().unwrap();
        assert_eq!(first, (set(4, &[0, 1]), BigUint::zero()));
        assert_eq!(dc.encode(&set(4, &[0, 1]), &BigUint::zero()).unwrap(), BitString::zeros(3));
        assert_eq!(dc.encode(&set(4, &[0, 1]), &BigUint::one()), Err(Error::CopyOutOfRange));
        assert!(DenseCode::new(4, 2, 2).is_err());
        assert!(dc.decode(&BitString::zeros(4)).is_err());
    }

    #[test]
    fn injective_round_trip_and_density_small() {
        for k in 1..=8 {
            for ell in 0..=k {
                let base = bits_for(&binomial(k, ell));
                for m in base..base + 3 {
                    let dc = DenseCode::new(k, ell, m).unwrap();
                    let copies = dc.copies().to_u64().unwrap();
                    let mut seen = HashSet::new();
                    for s in all_subsets(k, ell) {
                        let s = set(k, &s);
                        for j in 0..copies {
                            let j = BigUint::from(j);
                            let w = dc.encode(&s, &j).unwrap();
                            assert!(seen.insert(w.clone()));
                            assert_eq!(dc.decode(&w).unwrap(), Some((s.clone(), j)));
                        }
                    }
                    let invalid = (1usize << m) - seen.len();
                    let count = binomial(k, ell).to_usize().unwrap();
                    assert!(invalid < count, "k={k} ℓ={ell} m={m}");
                    assert!((dc.invalid_fraction() - invalid as f64 / (1u64 << m) as f64).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn uniform_pairs_give_uniform_codewords() {
        // Each valid codeword has exactly one preimage, so a uniform pair maps
        // to a uniform valid codeword; check the copy sampler covers [t_m].
        let dc = DenseCode::new(5, 2, 6).unwrap();
        assert_eq!(dc.copies(), &BigUint::from(6u32));
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut hits = [0u32; 6];
        for _ in 0..6000 {
            hits[dc.random_copy(&mut rng).to_usize().unwrap()] += 1;
        }
        assert!(hits.iter().all(|&h| (800..1200).contains(&h)), "{hits:?}");
    }

    #[test]
    fn bit_conversion() {
        let v = BigUint::from(0b1011u32);
        let b = biguint_to_bits(&v, 6).unwrap();
        assert_eq!(b, "110100".parse().unwrap());
        assert_eq!(bits_to_biguint(&b), v);
        assert!(biguint_to_bits(&v, 3).is_err());
        assert_eq!(bits_for(&BigUint::from(6u32)), 3);
        assert_eq!(bits_for(&BigUint::from(8u32)), 3);
        assert_eq!(bits_for(&BigUint::from(9u32)), 4);
        assert_eq!(bits_for(&BigUint::one()), 0);
    }

    proptest! {
        #[test]
        fn round_trip_at_protocol_scale(seed in 0u64..u64::MAX) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let dc = DenseCode::new(478, 14, 252).unwrap();
            let s = IndexSet::from_unsorted(478, rand::seq::index::sample(&mut rng, 478, 14).into_vec()).unwrap();
            let j = dc.random_copy(&mut rng);
            let w = dc.encode(&s, &j).unwrap();
            prop_assert_eq!(dc.decode(&w).unwrap(), Some((s, j)));
        }
    }
}
