//! Toeplitz hashing over GF(2).
//!
//! One construction serves both as the 2-universal family the verifier picks
//! `g` from and as the seeded strong extractor: the seed is the diagonal
//! string of the matrix.

use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// An `out_len × in_len` Toeplitz matrix with entry `(i, j) = diag[i + in_len − 1 − j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ToeplitzHash {
    in_len: usize,
    out_len: usize,
    diag: BitString,
}

impl ToeplitzHash {
    pub fn new(in_len: usize, out_len: usize, diag: BitString) -> Result<Self> {
        if in_len == 0 || out_len == 0 {
            return Err(Error::Domain { value: 0.0, domain: "hash dimensions ≥ 1" });
        }
        let expected = in_len + out_len - 1;
        if diag.len() != expected {
            return Err(Error::LengthMismatch { left: diag.len(), right: expected });
        }
        Ok(ToeplitzHash { in_len, out_len, diag })
    }

    pub fn random<R: Rng + ?Sized>(in_len: usize, out_len: usize, rng: &mut R) -> Result<Self> {
        let len = (in_len + out_len).saturating_sub(1);
        ToeplitzHash::new(in_len, out_len, BitString::random(len, rng))
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn diag(&self) -> &BitString {
        &self.diag
    }

    pub fn entry(&self, row: usize, col: usize) -> bool {
        self.diag.bit(row + self.in_len - 1 - col)
    }

    /// Matrix-vector product. Column `j` is the contiguous slice
    /// `diag[in_len−1−j ..][..out_len]`, so the product XORs one slice per
    /// set input bit.
    pub fn eval(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.in_len {
            return Err(Error::LengthMismatch { left: x.len(), right: self.in_len });
        }
        let mut out = BitString::zeros(self.out_len);
        for j in x.ones_positions() {
            let column = self.diag.slice(self.in_len - 1 - j, self.out_len)?;
            out.xor_assign(&column)?;
        }
        Ok(out)
    }
}

/// Seed of the strong extractor; its length fixes the extractor's shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtractorSeed(pub BitString);

impl ExtractorSeed {
    pub fn random<R: Rng + ?Sized>(in_len: usize, out_len: usize, rng: &mut R) -> Self {
        ExtractorSeed(BitString::random((in_len + out_len).saturating_sub(1), rng))
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }
}

/// Toeplitz hash of `x` keyed by `seed`; `seed` must have `x.len() + out_len − 1` bits.
pub fn strong_extract(x: &BitString, seed: &ExtractorSeed, out_len: usize) -> Result<BitString> {
    let expected = (x.len() + out_len).saturating_sub(1);
    if seed.0.len() != expected {
        return Err(Error::LengthMismatch { left: seed.0.len(), right: expected });
    }
    ToeplitzHash::new(x.len(), out_len, seed.0.clone())?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infomath::{statistical_distance, Distribution};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashMap;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// Reference product built entry by entry from the definition.
    fn naive_eval(in_len: usize, out_len: usize, diag: &BitString, x: &BitString) -> BitString {
        (0..out_len)
            .map(|i| (0..in_len).fold(false, |acc, j| acc ^ (diag.bit(i + in_len - 1 - j) & x.bit(j))))
            .collect()
    }

    #[test]
    fn zero_seed_maps_everything_to_zero() {
        let g = ToeplitzHash::new(5, 3, BitString::zeros(7)).unwrap();
        for v in 0..32 {
            assert_eq!(g.eval(&BitString::from_u64(v, 5)).unwrap(), BitString::zeros(3));
        }
    }

    #[test]
    fn zero_input_maps_to_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let g = ToeplitzHash::random(9, 4, &mut rng).unwrap();
        assert_eq!(g.eval(&BitString::zeros(9)).unwrap(), BitString::zeros(4));
    }

    #[test]
    fn hand_built_matrix() {
        // in=3, out=2, diag = d0 d1 d2 d3 = 1 0 1 1
        // row 0: (d2, d1, d0) = (1, 0, 1); row 1: (d3, d2, d1) = (1, 1, 0)
        let g = ToeplitzHash::new(3, 2, bs("1011")).unwrap();
        assert_eq!(
            [g.entry(0, 0), g.entry(0, 1), g.entry(0, 2), g.entry(1, 0), g.entry(1, 1), g.entry(1, 2)],
            [true, false, true, true, true, false]
        );
        // x = 101: row 0 → 1+1 = 0, row 1 → 1+0 = 1
        assert_eq!(g.eval(&bs("101")).unwrap(), bs("01"));
    }

    #[test]
    fn dimension_errors() {
        assert!(ToeplitzHash::new(3, 2, bs("101")).is_err());
        assert!(ToeplitzHash::new(3, 0, bs("10")).is_err());
        let g = ToeplitzHash::new(3, 2, bs("1011")).unwrap();
        assert!(g.eval(&bs("10")).is_err());
        assert!(strong_extract(&bs("101"), &ExtractorSeed(bs("10")), 2).is_err());
    }

    #[test]
    fn extractor_is_deterministic_and_kills_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let seed = ExtractorSeed::random(40, 7, &mut rng);
        let x = BitString::random(40, &mut rng);
        assert_eq!(strong_extract(&x, &seed, 7).unwrap(), strong_extract(&x, &seed, 7).unwrap());
        assert_eq!(strong_extract(&BitString::zeros(40), &seed, 7).unwrap(), BitString::zeros(7));
    }

    #[test]
    fn exact_two_universality() {
        for (in_len, out_len) in [(3, 1), (4, 2), (6, 3), (8, 4), (10, 4)] {
            let seeds = 1u64 << (in_len + out_len - 1);
            let xs = 1u64 << in_len;
            // A spread of pairs; every pair for the smaller shapes.
            let pairs: Vec<(u64, u64)> = if in_len <= 6 {
                (0..xs).flat_map(|a| (a + 1..xs).map(move |b| (a, b))).collect()
            } else {
                (0..xs).step_by(37).flat_map(|a| [(a, (a * 7 + 1) % xs), (a, a ^ 1)]).filter(|(a, b)| a != b).collect()
            };
            for (a, b) in pairs {
                let (x, y) = (BitString::from_u64(a, in_len), BitString::from_u64(b, in_len));
                let collisions = (0..seeds)
                    .filter(|&s| {
                        let g = ToeplitzHash::new(in_len, out_len, BitString::from_u64(s, in_len + out_len - 1)).unwrap();
                        g.eval(&x).unwrap() == g.eval(&y).unwrap()
                    })
                    .count() as u64;
                assert_eq!(collisions * (1 << out_len), seeds, "in={in_len} out={out_len} pair=({a},{b})");
            }
        }
    }

    #[test]
    fn leftover_hash_micro_instance() {
        // x uniform over a 16-element subset of {0,1}^8; out_len 2.
        let support: Vec<u64> = (0..256u64).filter(|v| v.count_ones() % 2 == 0).step_by(8).collect();
        assert_eq!(support.len(), 16);
        let out_len = 2;
        let seed_len = 8 + out_len - 1;
        let mut real: HashMap<(u64, u64), u64> = HashMap::new();
        let mut ideal: HashMap<(u64, u64), u64> = HashMap::new();
        for s in 0..(1u64 << seed_len) {
            let seed = ExtractorSeed(BitString::from_u64(s, seed_len));
            for &x in &support {
                let y = strong_extract(&BitString::from_u64(x, 8), &seed, out_len).unwrap().to_u64().unwrap();
                *real.entry((y, s)).or_default() += 4;
            }
            for y in 0..4 {
                *ideal.entry((y, s)).or_default() += 16;
            }
        }
        let real = Distribution::from_counts(real).unwrap();
        let ideal = Distribution::from_counts(ideal).unwrap();
        let sd = statistical_distance(&real, &ideal);
        let bound = 0.5 * 2f64.powf((out_len as f64 - 4.0) / 2.0);
        assert!(sd <= bound, "sd {sd} > {bound}");
    }

    proptest! {
        #[test]
        fn eval_matches_definition_and_is_linear(in_len in 1usize..150, out_len in 1usize..90, seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let g = ToeplitzHash::random(in_len, out_len, &mut rng).unwrap();
            let x = BitString::random(in_len, &mut rng);
            let y = BitString::random(in_len, &mut rng);
            let gx = g.eval(&x).unwrap();
            prop_assert_eq!(&gx, &naive_eval(in_len, out_len, g.diag(), &x));
            let sum = g.eval(&x.xor(&y).unwrap()).unwrap();
            prop_assert_eq!(sum, gx.xor(&g.eval(&y).unwrap()).unwrap());
        }
    }
}
