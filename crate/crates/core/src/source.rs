//! The public random source, its noisy copy, position sampling, and the
//! bounded-storage adversary's memory.

use std::fmt;
use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bits::{BitString, IndexSet};
use crate::error::{Error, Result};

/// Picks the positions to flip; receives the clean source string.
pub type ErrorCallback = Arc<dyn Fn(&BitString) -> Vec<usize> + Send + Sync>;

#[derive(Clone)]
pub enum ErrorModel {
    /// `⌊δn⌋` distinct uniformly random positions.
    Random,
    /// `⌊δn⌋` consecutive positions from a uniform start, wrapping around.
    Burst,
    /// Caller-chosen positions, clamped to `⌊δn⌋` distinct ones.
    Adversarial(ErrorCallback),
}

impl fmt::Debug for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorModel::Random => write!(f, "Random"),
            ErrorModel::Burst => write!(f, "Burst"),
            ErrorModel::Adversarial(_) => write!(f, "Adversarial(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SourceConfig {
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    pub error_model: ErrorModel,
    pub seed: u64,
}

impl SourceConfig {
    pub fn new(n: usize, alpha: f64, delta: f64, seed: u64) -> Self {
        SourceConfig { n, alpha, delta, error_model: ErrorModel::Random, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain { value: 0.0, domain: "n ≥ 1" });
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Domain { value: self.alpha, domain: "0 < α ≤ 1" });
        }
        if !(0.0..0.5).contains(&self.delta) {
            return Err(Error::Domain { value: self.delta, domain: "0 ≤ δ < 1/2" });
        }
        Ok(())
    }

    pub fn max_errors(&self) -> usize {
        error_budget(self.n, self.delta)
    }
}

/// `⌊δn⌋`, guarded against products like `0.1 · 100 = 10.000000000000002`
/// landing just below an integer.
pub fn error_budget(n: usize, delta: f64) -> usize {
    (delta * n as f64 + 1e-9).floor() as usize
}

/// A source whose `⌈αn⌉` support positions carry independent uniform bits;
/// all other positions are 0. Its min-entropy is exactly `⌈αn⌉`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaSource {
    support: IndexSet,
}

impl AlphaSource {
    pub fn new<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Result<Self> {
        let free = ((alpha * n as f64) - 1e-9).ceil().max(0.0) as usize;
        Ok(AlphaSource { support: sample_positions(n, free.min(n), rng)? })
    }

    pub fn with_support(support: IndexSet) -> Self {
        AlphaSource { support }
    }

    pub fn n(&self) -> usize {
        self.support.ground()
    }

    pub fn support(&self) -> &IndexSet {
        &self.support
    }

    pub fn min_entropy(&self) -> usize {
        self.support.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let mut x = BitString::zeros(self.n());
        for &i in self.support.indices() {
            x.set(i, rng.gen()).unwrap();
        }
        x
    }

    /// Every string in the support, in order of the free bits' integer value.
    pub fn enumerate(&self) -> Result<impl Iterator<Item = BitString> + '_> {
        if self.support.len() > 24 {
            return Err(Error::RegimeTooLarge(format!("2^{} source strings", self.support.len())));
        }
        Ok((0..1u64 << self.support.len()).map(move |v| {
            let mut x = BitString::zeros(self.n());
            for (b, &i) in self.support.indices().iter().enumerate() {
                x.set(i, v >> b & 1 == 1).unwrap();
            }
            x
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourcePair {
    pub x: BitString,
    pub x_tilde: BitString,
    pub error_count: usize,
    /// Set when an adversarial error callback asked for more flips than allowed.
    pub clamped: bool,
}

impl SourcePair {
    /// `x` then `x̃`, each with an 8-byte little-endian bit-length header.
    pub fn to_raw(&self) -> Vec<u8> {
        let mut out = self.x.to_raw();
        out.extend(self.x_tilde.to_raw());
        out
    }

    pub fn from_raw(bytes: &[u8]) -> Result<Self> {
        let (x, rest) = BitString::from_raw(bytes)?;
        let (x_tilde, rest) = BitString::from_raw(rest)?;
        if !rest.is_empty() {
            return Err(Error::Frame("trailing bytes after source dump".into()));
        }
        let error_count = x.hamming(&x_tilde)?;
        Ok(SourcePair { x, x_tilde, error_count, clamped: false })
    }
}

/// Flips exactly `⌊δn⌋` positions of `x` according to `model`.
pub fn inject_errors<R: Rng + ?Sized>(
    x: &BitString,
    delta: f64,
    model: &ErrorModel,
    rng: &mut R,
) -> Result<SourcePair> {
    let n = x.len();
    let budget = error_budget(n, delta);
    let (positions, clamped) = match model {
        ErrorModel::Random => (sample_positions(n, budget, rng)?.indices().to_vec(), false),
        ErrorModel::Burst => {
            let start = if n == 0 { 0 } else { rng.gen_range(0..n) };
            ((0..budget).map(|i| (start + i) % n).collect(), false)
        }
        ErrorModel::Adversarial(callback) => {
            let mut requested = callback(x);
            requested.retain(|&i| i < n);
            let mut seen = vec![false; n];
            requested.retain(|&i| !std::mem::replace(&mut seen[i], true));
            let clamped = requested.len() > budget;
            requested.truncate(budget);
            (requested, clamped)
        }
    };
    let mut x_tilde = x.clone();
    for &i in &positions {
        x_tilde.flip(i)?;
    }
    Ok(SourcePair { x: x.clone(), x_tilde, error_count: positions.len(), clamped })
}

pub fn generate(cfg: &SourceConfig) -> Result<SourcePair> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let source = AlphaSource::new(cfg.n, cfg.alpha, &mut rng)?;
    let x = source.sample(&mut rng);
    inject_errors(&x, cfg.delta, &cfg.error_model, &mut rng)
}

/// A uniformly random `k`-subset of `[n]`.
pub fn sample_positions<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<IndexSet> {
    if k > n {
        return Err(Error::SampleTooLarge { n, k });
    }
    IndexSet::from_unsorted(n, index::sample(rng, n, k).into_vec())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StorageStrategy {
    /// The first `budget` positions.
    Prefix,
    /// `budget` uniformly random positions.
    RandomPositions,
    /// A caller-supplied list, kept in order until the budget runs out.
    Positions(Vec<usize>),
    /// Every position; truncated unless the budget is `n`.
    Full,
}

/// What the adversary keeps of `X̃`: the bits at `positions`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedMemory {
    pub budget: usize,
    pub positions: IndexSet,
    pub stored: BitString,
    pub descriptor: String,
    /// The strategy wanted more than `budget` bits.
    pub truncated: bool,
}

pub fn adversary_store<R: Rng + ?Sized>(
    x_tilde: &BitString,
    strategy: &StorageStrategy,
    budget: usize,
    rng: &mut R,
) -> Result<BoundedMemory> {
    let n = x_tilde.len();
    if budget > n {
        return Err(Error::SampleTooLarge { n, k: budget });
    }
    let (wanted, descriptor): (Vec<usize>, String) = match strategy {
        StorageStrategy::Prefix => ((0..budget).collect(), format!("prefix:{budget}")),
        StorageStrategy::RandomPositions => {
            (sample_positions(n, budget, rng)?.indices().to_vec(), format!("random:{budget}"))
        }
        StorageStrategy::Positions(list) => {
            if let Some(&bad) = list.iter().find(|&&i| i >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
            let mut seen = vec![false; n];
            let distinct = list.iter().copied().filter(|&i| !std::mem::replace(&mut seen[i], true)).collect();
            (distinct, "positions".to_string())
        }
        StorageStrategy::Full => ((0..n).collect(), "full".to_string()),
    };
    let truncated = wanted.len() > budget;
    let kept: Vec<usize> = wanted.into_iter().take(budget).collect();
    let positions = IndexSet::from_unsorted(n, kept)?;
    let stored = x_tilde.restrict(&positions)?;
    Ok(BoundedMemory { budget, positions, stored, descriptor, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infomath::{min_entropy, Distribution};
    use std::collections::HashMap;

    #[test]
    fn noiseless_source_is_copied() {
        let pair = generate(&SourceConfig::new(300, 1.0, 0.0, 1)).unwrap();
        assert_eq!(pair.x, pair.x_tilde);
        assert_eq!(pair.error_count, 0);
    }

    #[test]
    fn exact_error_count() {
        for model in [ErrorModel::Random, ErrorModel::Burst] {
            let cfg = SourceConfig { error_model: model, ..SourceConfig::new(100, 1.0, 0.1, 3) };
            let pair = generate(&cfg).unwrap();
            assert_eq!(pair.x.hamming(&pair.x_tilde).unwrap(), 10);
        }
    }

    #[test]
    fn error_bound_holds_over_many_draws() {
        for seed in 0..10_000u64 {
            let model = if seed % 2 == 0 { ErrorModel::Random } else { ErrorModel::Burst };
            let cfg = SourceConfig { error_model: model, ..SourceConfig::new(97, 0.8, 0.13, seed) };
            let pair = generate(&cfg).unwrap();
            assert_eq!(pair.x.hamming(&pair.x_tilde).unwrap(), 12);
        }
    }

    #[test]
    fn adversarial_errors_are_clamped() {
        let all: ErrorCallback = Arc::new(|x: &BitString| (0..x.len()).chain(0..5).collect());
        let cfg = SourceConfig { error_model: ErrorModel::Adversarial(all), ..SourceConfig::new(50, 1.0, 0.1, 9) };
        let pair = generate(&cfg).unwrap();
        assert!(pair.clamped);
        assert_eq!(pair.error_count, 5);
        assert_eq!(pair.x.xor(&pair.x_tilde).unwrap().ones_positions().collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);

        let few: ErrorCallback = Arc::new(|_: &BitString| vec![7, 7, 3]);
        let cfg = SourceConfig { error_model: ErrorModel::Adversarial(few), ..SourceConfig::new(50, 1.0, 0.1, 9) };
        let pair = generate(&cfg).unwrap();
        assert!(!pair.clamped);
        assert_eq!(pair.error_count, 2);
    }

    #[test]
    fn config_validation() {
        assert!(generate(&SourceConfig::new(10, 0.0, 0.0, 0)).is_err());
        assert!(generate(&SourceConfig::new(10, 1.0, 0.5, 0)).is_err());
        assert!(generate(&SourceConfig::new(0, 1.0, 0.0, 0)).is_err());
    }

    #[test]
    fn half_rate_source_on_eight_bits() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let src = AlphaSource::new(8, 0.5, &mut rng).unwrap();
        assert_eq!(src.min_entropy(), 4);
        let strings: Vec<BitString> = src.enumerate().unwrap().collect();
        let dist = Distribution::uniform(strings.clone()).unwrap();
        assert_eq!(min_entropy(&dist).unwrap(), 4.0);
        for _ in 0..200 {
            assert!(strings.contains(&src.sample(&mut rng)));
        }
    }

    #[test]
    fn sample_positions_edges() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert_eq!(sample_positions(7, 7, &mut rng).unwrap(), IndexSet::full(7));
        assert_eq!(sample_positions(7, 0, &mut rng).unwrap(), IndexSet::empty(7));
        assert_eq!(sample_positions(3, 4, &mut rng), Err(Error::SampleTooLarge { n: 3, k: 4 }));
    }

    #[test]
    fn sample_positions_uniform() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let draws = 60_000;
        let mut counts: HashMap<Vec<usize>, u32> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(sample_positions(6, 3, &mut rng).unwrap().indices().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 20);
        let p = 1.0 / 20.0;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (s, &c) in &counts {
            assert!((c as f64 - draws as f64 * p).abs() <= 3.0 * sigma, "{s:?}: {c}");
        }
    }

    #[test]
    fn storage_strategies() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let x: BitString = "10110110".parse().unwrap();
        let mem = adversary_store(&x, &StorageStrategy::Prefix, 4, &mut rng).unwrap();
        assert_eq!(mem.stored, "1011".parse().unwrap());
        assert!(!mem.truncated);
        let full = adversary_store(&x, &StorageStrategy::Full, 8, &mut rng).unwrap();
        assert_eq!(full.stored, x);
        let none = adversary_store(&x, &StorageStrategy::RandomPositions, 0, &mut rng).unwrap();
        assert!(none.stored.is_empty());
        let cut = adversary_store(&x, &StorageStrategy::Full, 3, &mut rng).unwrap();
        assert!(cut.truncated);
        assert_eq!(cut.stored.len(), 3);
        let listed = adversary_store(&x, &StorageStrategy::Positions(vec![7, 0, 7, 2]), 2, &mut rng).unwrap();
        assert_eq!(listed.positions.indices(), &[0, 7]);
        assert!(listed.truncated);
        assert!(adversary_store(&x, &StorageStrategy::Positions(vec![8]), 2, &mut rng).is_err());
        assert!(adversary_store(&x, &StorageStrategy::Prefix, 9, &mut rng).is_err());
        let random = adversary_store(&x, &StorageStrategy::RandomPositions, 5, &mut rng).unwrap();
        assert_eq!(random.stored.len(), 5);
    }

    #[test]
    fn raw_dump_round_trip() {
        let pair = generate(&SourceConfig::new(77, 0.6, 0.1, 5)).unwrap();
        let back = SourcePair::from_raw(&pair.to_raw()).unwrap();
        assert_eq!(back, pair);
        assert_eq!(&pair.to_raw()[..8], &77u64.to_le_bytes());
        let mut extra = pair.to_raw();
        extra.push(0);
        assert!(SourcePair::from_raw(&extra).is_err());
    }
}
