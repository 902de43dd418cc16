//! Adversaries and exact or Monte Carlo oracles for the security bounds.
//!
//! Micro-regime oracles work on strings packed into `u64` words; the packed
//! Toeplitz evaluation is cross-checked against [`ToeplitzHash`] in tests.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::bits::{BitString, IndexSet};
use crate::codes::{for_each_pattern, LinearCode};
use crate::error::{Error, Result};
use crate::ihash::{run_honest, solve, IhQuerier};
use crate::infomath::{binary_entropy, sample_size};
use crate::source::sample_positions;

/// Global slack on Monte Carlo bounds.
pub const MONTE_CARLO_SLACK: f64 = 2.0;
/// Global slack on bounds whose constants are not known.
pub const UNKNOWN_CONSTANT_SLACK: f64 = 4.0;

/// Outcome of a randomized experiment against a closed-form bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackReport {
    pub name: String,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub bound: f64,
    pub formula: String,
    pub slack: f64,
    /// Additive allowance for sampling error.
    pub tolerance: f64,
    pub pass: bool,
}

impl AttackReport {
    pub fn new(
        name: impl Into<String>,
        trials: u64,
        successes: u64,
        bound: f64,
        formula: impl Into<String>,
        slack: f64,
        tolerance: f64,
    ) -> Self {
        let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        AttackReport {
            name: name.into(),
            trials,
            successes,
            rate,
            bound,
            formula: formula.into(),
            slack,
            tolerance,
            pass: rate <= slack * bound + tolerance,
        }
    }

    /// Three binomial standard errors at the slackened bound.
    pub fn with_stderr(name: impl Into<String>, trials: u64, successes: u64, bound: f64, formula: impl Into<String>, slack: f64) -> Self {
        let p = (slack * bound).min(1.0);
        let tolerance = 3.0 * (p * (1.0 - p) / trials.max(1) as f64).sqrt();
        AttackReport::new(name, trials, successes, bound, formula, slack, tolerance)
    }
}

impl fmt::Display for AttackReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "name={} trials={} successes={} rate={:.6} bound={:.6e} slack={} tolerance={:.6} pass={} formula=\"{}\"",
            self.name, self.trials, self.successes, self.rate, self.bound, self.slack, self.tolerance, self.pass, self.formula
        )
    }
}

/// An exactly enumerated distance against a leftover-hash bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub name: String,
    pub distance: f64,
    /// Average conditional min-entropy of the extractor input, in bits.
    pub min_entropy: f64,
    pub bound: f64,
    pub formula: String,
    pub pass: bool,
}

impl DistanceReport {
    fn new(name: &str, distance: f64, min_entropy: f64, out_len: usize) -> Self {
        let bound = 0.5 * 2f64.powf((out_len as f64 - min_entropy) / 2.0);
        DistanceReport {
            name: name.to_string(),
            distance,
            min_entropy,
            bound,
            formula: "½·2^((m − H∞)/2)".to_string(),
            pass: distance <= bound + 1e-12,
        }
    }
}

impl fmt::Display for DistanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "name={} distance={:.6} min_entropy={:.4} bound={:.6} pass={} formula=\"{}\"",
            self.name, self.distance, self.min_entropy, self.bound, self.pass, self.formula
        )
    }
}

/// Exhaustive check of a combinatorial inequality over a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    /// Smallest `log2(rhs) − log2(lhs)` over the grid.
    pub min_margin: f64,
    pub pass: bool,
}

impl fmt::Display for LemmaCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "name={} cases={} failures={} min_margin={:.6} pass={}",
            self.name, self.cases, self.failures, self.min_margin, self.pass
        )
    }
}

/// Rows of an `out × in` Toeplitz matrix as `in`-bit masks.
pub(crate) fn toeplitz_rows(diag: u64, in_len: usize, out_len: usize) -> Vec<u64> {
    (0..out_len)
        .map(|i| (0..in_len).fold(0u64, |row, j| row | ((diag >> (i + in_len - 1 - j)) & 1) << j))
        .collect()
}

pub(crate) fn apply_rows(rows: &[u64], x: u64) -> u64 {
    rows.iter().enumerate().fold(0u64, |acc, (i, &r)| acc | (((x & r).count_ones() & 1) as u64) << i)
}

fn to_word(bits: &BitString) -> u64 {
    bits.to_u64().expect("micro strings fit in a word")
}

/// Micro parameters for the binding attack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BindingSetup {
    pub k: usize,
    pub digest_len: usize,
    /// Error tolerance `σ = δ + ζ`.
    pub sigma: f64,
}

impl BindingSetup {
    pub fn omega(&self) -> f64 {
        self.digest_len as f64 / self.k as f64
    }

    pub fn radius(&self) -> usize {
        (self.sigma * self.k as f64 + 1e-9).floor() as usize
    }

    /// `2^{−(ω − 2h(σ))k}`.
    pub fn bound(&self) -> Result<f64> {
        let exponent = (self.omega() - 2.0 * binary_entropy(self.sigma)?) * self.k as f64;
        Ok(2f64.powf(-exponent))
    }
}

/// Ball points tried per trial when the ball is too large to enumerate.
const BALL_SAMPLES: usize = 1 << 14;

/// A cheating committer holding `X̃^A` tries to find `W ≠ W′` in the
/// `⌊σk⌋`-ball around it with `g(W) = g(W′)` for a fresh `g`.
pub fn binding_attack<R: Rng + ?Sized>(setup: BindingSetup, trials: u64, rng: &mut R) -> Result<AttackReport> {
    let BindingSetup { k, digest_len, .. } = setup;
    if k == 0 || k > 32 || digest_len == 0 || digest_len > 24 {
        return Err(Error::RegimeTooLarge(format!("binding attack needs k ≤ 32, ωk ≤ 24 (k={k}, ωk={digest_len})")));
    }
    let radius = setup.radius();
    let mut successes = 0;
    for _ in 0..trials {
        let center = to_word(&BitString::random(k, rng));
        let rows = toeplitz_rows(to_word(&BitString::random(k + digest_len - 1, rng)), k, digest_len);
        let mut digests = HashSet::new();
        let mut found = false;
        if k <= 16 {
            'ball: for w in 0..=radius {
                let mut collided = false;
                for_each_pattern(k, w, |e| {
                    collided = !digests.insert(apply_rows(&rows, center ^ e as u64));
                    !collided
                });
                if collided {
                    found = true;
                    break 'ball;
                }
            }
        } else {
            let mut tried = HashSet::new();
            for _ in 0..BALL_SAMPLES {
                let weight = rng.gen_range(0..=radius);
                let e = index::sample(rng, k, weight).iter().fold(0u64, |acc, i| acc | 1 << i);
                if tried.insert(e) && !digests.insert(apply_rows(&rows, center ^ e)) {
                    found = true;
                    break;
                }
            }
        }
        successes += found as u64;
    }
    Ok(AttackReport::new(
        format!("binding(k={k},ωk={digest_len},σ={})", setup.sigma),
        trials,
        successes,
        setup.bound()?,
        "2^(−(ω−2h(σ))k)",
        UNKNOWN_CONSTANT_SLACK,
        0.0,
    ))
}

/// Micro parameters for the exact hiding computation. The source is
/// uniform on `n` bits and noiseless; the adversary has stored the bits at
/// `stored` with the given values.
#[derive(Clone, Debug, PartialEq)]
pub struct HidingSetup {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub digest_len: usize,
    pub stored: IndexSet,
    pub stored_value: BitString,
}

impl HidingSetup {
    /// Adversary storing the first `budget` bits, all zero.
    pub fn prefix(n: usize, k: usize, m: usize, digest_len: usize, budget: usize) -> Result<Self> {
        Ok(HidingSetup {
            n,
            k,
            m,
            digest_len,
            stored: IndexSet::new(n, (0..budget).collect())?,
            stored_value: BitString::zeros(budget),
        })
    }
}

/// Every `k`-subset of `[n]` as a bitmask.
fn subsets_of(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_pattern(n, k, |v| {
        out.push(v as u64);
        true
    });
    out
}

/// Spreads the low bits of `z` over the coordinates listed in `free`.
fn deposit(z: u64, free: &[usize]) -> u64 {
    free.iter().enumerate().fold(0u64, |acc, (b, &pos)| acc | ((z >> b) & 1) << pos)
}

/// Exact statistical distance between the committed-message views for
/// `v1` and `v2`, averaged over `A`, `g` and `u`, with the leftover-hash
/// bound computed from the enumerated average min-entropy of `X^A` given
/// `(A, g, g(X^A))` and the stored bits.
pub fn hiding_distance(setup: &HidingSetup, v1: u64, v2: u64) -> Result<DistanceReport> {
    let HidingSetup { n, k, m, digest_len: d, .. } = *setup;
    if n > 12 || m == 0 || m > 2 || k == 0 || k > 8 || k > n || d == 0 || d > 4 {
        return Err(Error::RegimeTooLarge(format!("hiding enumeration needs n ≤ 12, m ≤ 2, k ≤ 8, ωk ≤ 4 (n={n})")));
    }
    if setup.stored.ground() != n || setup.stored_value.len() != setup.stored.len() {
        return Err(Error::GroundMismatch { left: setup.stored.ground(), right: n });
    }
    if v1 >> m != 0 || v2 >> m != 0 {
        return Err(Error::Domain { value: v1.max(v2) as f64, domain: "v < 2^m" });
    }
    // Group the sets A by which coordinates of X^A the adversary knows.
    let mut groups: HashMap<(u64, u64), u64> = HashMap::new();
    let subsets = subsets_of(n, k);
    for &a in &subsets {
        let (mut mask, mut value) = (0u64, 0u64);
        for (j, pos) in (0..n).filter(|p| a >> p & 1 == 1).enumerate() {
            if let Some(s) = setup.stored.position(pos) {
                mask |= 1 << j;
                value |= (setup.stored_value.bit(s) as u64) << j;
            }
        }
        *groups.entry((mask, value)).or_default() += 1;
    }
    let total_sets = subsets.len() as f64;
    let g_count = 1u64 << (k + d - 1);
    let u_count = 1u64 << (k + m - 1);
    let g_rows: Vec<Vec<u64>> = (0..g_count).map(|g| toeplitz_rows(g, k, d)).collect();
    let u_rows: Vec<Vec<u64>> = (0..u_count).map(|u| toeplitz_rows(u, k, m)).collect();

    let mut distance = 0.0;
    let mut guess = 0.0;
    for (&(mask, value), &count) in &groups {
        let weight = count as f64 / total_sets;
        let free: Vec<usize> = (0..k).filter(|j| mask >> j & 1 == 0).collect();
        let xs: Vec<u64> = (0..1u64 << free.len()).map(|z| value | deposit(z, &free)).collect();
        let px = 1.0 / xs.len() as f64;
        let ys: Vec<Vec<u64>> = u_rows.iter().map(|rows| xs.iter().map(|&x| apply_rows(rows, x)).collect()).collect();
        for rows in &g_rows {
            let digests: Vec<u64> = xs.iter().map(|&x| apply_rows(rows, x)).collect();
            let distinct = digests.iter().collect::<HashSet<_>>().len();
            guess += weight / g_count as f64 * distinct as f64 * px;
            for y_row in &ys {
                let mut joint = vec![0.0; 1 << (m + d)];
                for (y, dig) in y_row.iter().zip(&digests) {
                    joint[(*y as usize) << d | *dig as usize] += px;
                }
                let mut sd = 0.0;
                for omega in 0..1u64 << m {
                    for dig in 0..1u64 << d {
                        let p1 = joint[((omega ^ v1) as usize) << d | dig as usize];
                        let p2 = joint[((omega ^ v2) as usize) << d | dig as usize];
                        sd += (p1 - p2).abs();
                    }
                }
                distance += weight / (g_count * u_count) as f64 * 0.5 * sd;
            }
        }
    }
    let min_entropy = 0.0 - guess.log2();
    Ok(DistanceReport::new(&format!("hiding(n={n},k={k},m={m},stored={})", setup.stored.len()), distance, min_entropy, m))
}

/// Micro parameters for the sender-privacy computation. The receiver knows
/// the stored bits, the branch subsets (positions within `a`), both helper
/// strings and seeds, and the on-branch pad.
#[derive(Clone, Debug)]
pub struct OffBranchSetup {
    pub n: usize,
    pub a: IndexSet,
    pub c_on: IndexSet,
    pub c_off: IndexSet,
    pub code: LinearCode,
    pub payload_len: usize,
    pub stored: IndexSet,
    pub stored_value: BitString,
}

/// Exact distance of the off-branch pad `Y_{1−d}` from uniform given the
/// receiver's view, averaged over both extractor seeds.
pub fn ot_offbranch_distance(setup: &OffBranchSetup) -> Result<DistanceReport> {
    let ell = setup.c_on.len();
    let pl = setup.payload_len;
    if setup.n > 12 || ell == 0 || ell > 4 || setup.c_off.len() != ell || pl == 0 || pl > 2 {
        return Err(Error::RegimeTooLarge("off-branch enumeration needs n ≤ 12, ℓ ≤ 4, m_Fℓ ≤ 2".into()));
    }
    if !ell.is_multiple_of(setup.code.length()) {
        return Err(Error::InvalidCode("code length must divide ℓ".into()));
    }
    let abs_on = setup.a.select(&setup.c_on)?;
    let abs_off = setup.a.select(&setup.c_off)?;
    let union = IndexSet::from_unsorted(setup.n, abs_on.indices().iter().chain(abs_off.indices()).copied().collect())?;
    let mut base = BitString::zeros(setup.n);
    let mut free = Vec::new();
    for &pos in union.indices() {
        match setup.stored.position(pos) {
            Some(s) => base.set(pos, setup.stored_value.bit(s))?,
            None => free.push(pos),
        }
    }
    let fe_blocks = ell / setup.code.length();
    let syndrome = |x: &BitString| -> Result<u64> {
        let parts = (0..fe_blocks)
            .map(|b| setup.code.syndrome(&x.slice(b * setup.code.length(), setup.code.length())?))
            .collect::<Result<Vec<_>>>()?;
        Ok(to_word(&BitString::concat(&parts)))
    };
    // Per source assignment: (x_on, x_off, P_on, P_off).
    let mut views = Vec::with_capacity(1 << free.len());
    for z in 0..1u64 << free.len() {
        let mut x = base.clone();
        for (b, &pos) in free.iter().enumerate() {
            x.set(pos, z >> b & 1 == 1)?;
        }
        let (x_on, x_off) = (x.restrict(&abs_on)?, x.restrict(&abs_off)?);
        views.push((to_word(&x_on), to_word(&x_off), syndrome(&x_on)?, syndrome(&x_off)?));
    }
    let px = 1.0 / views.len() as f64;
    let seeds = 1u64 << (ell + pl - 1);
    let rows: Vec<Vec<u64>> = (0..seeds).map(|s| toeplitz_rows(s, ell, pl)).collect();
    let mut distance = 0.0;
    let mut guess = 0.0;
    for on_rows in &rows {
        for off_rows in &rows {
            // key = (P_on, P_off, Y_on)
            let mut by_key: HashMap<(u64, u64, u64), Vec<f64>> = HashMap::new();
            let mut by_key_x: HashMap<((u64, u64, u64), u64), f64> = HashMap::new();
            for &(x_on, x_off, p_on, p_off) in &views {
                let key = (p_on, p_off, apply_rows(on_rows, x_on));
                by_key.entry(key).or_insert_with(|| vec![0.0; 1 << pl])[apply_rows(off_rows, x_off) as usize] += px;
                *by_key_x.entry((key, x_off)).or_default() += px;
            }
            let mut sd = 0.0;
            for ys in by_key.values() {
                let mass: f64 = ys.iter().sum();
                sd += ys.iter().map(|p| (p - mass / ys.len() as f64).abs()).sum::<f64>();
            }
            distance += 0.5 * sd / (seeds * seeds) as f64;
            let mut best: HashMap<(u64, u64, u64), f64> = HashMap::new();
            for (&(key, _), &p) in &by_key_x {
                let slot = best.entry(key).or_default();
                *slot = slot.max(p);
            }
            guess += best.values().sum::<f64>() / (seeds * seeds) as f64;
        }
    }
    let min_entropy = 0.0 - guess.log2();
    Ok(DistanceReport::new(
        &format!("ot-offbranch(ℓ={ell},code={},stored={})", setup.code.name(), setup.stored.len()),
        distance,
        min_entropy,
        pl,
    ))
}

/// Two independent `k`-subsets of `[n]` meet in fewer than `ℓ` positions
/// with probability below `e^{−ℓ/4}`, for `k = 2√(ℓn)`.
pub fn lemma_birthday<R: Rng + ?Sized>(n: usize, ell: usize, trials: u64, rng: &mut R) -> Result<AttackReport> {
    let k = sample_size(n, ell);
    if k > n {
        return Err(Error::SampleTooLarge { n, k });
    }
    let mut failures = 0;
    for _ in 0..trials {
        let a = sample_positions(n, k, rng)?;
        let b = sample_positions(n, k, rng)?;
        failures += (a.intersect(&b)?.len() < ell) as u64;
    }
    let bound = (-(ell as f64) / 4.0).exp();
    Ok(AttackReport::with_stderr(format!("birthday(n={n},ℓ={ell})"), trials, failures, bound, "e^(−ℓ/4)", MONTE_CARLO_SLACK))
}

/// Random `r`-subsets preserve relative Hamming distance to within `ν`,
/// each direction failing with probability at most `e^{−rν²/2}`. The pair
/// differs in exactly `⌊δn⌋` positions, so the reference rate is `⌊δn⌋/n`.
pub fn lemma_subset_hd<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    delta: f64,
    nu: f64,
    trials: u64,
    rng: &mut R,
) -> Result<(AttackReport, AttackReport)> {
    if r == 0 || r > n {
        return Err(Error::SampleTooLarge { n, k: r });
    }
    let errors = crate::source::error_budget(n, delta);
    let rate = errors as f64 / n as f64;
    let (mut above, mut below) = (0, 0);
    for _ in 0..trials {
        let diff = sample_positions(n, errors, rng)?;
        let s = sample_positions(n, r, rng)?;
        let local = diff.intersect(&s)?.len() as f64 / r as f64;
        above += (local > rate + nu) as u64;
        below += (local < rate - nu) as u64;
    }
    let bound = (-(r as f64) * nu * nu / 2.0).exp();
    let name = |dir: &str| format!("subset-hd-{dir}(n={n},r={r},δ={delta},ν={nu})");
    Ok((
        AttackReport::with_stderr(name("upper"), trials, above, bound, "e^(−rν²/2)", MONTE_CARLO_SLACK),
        AttackReport::with_stderr(name("lower"), trials, below, bound, "e^(−rν²/2)", MONTE_CARLO_SLACK),
    ))
}

fn binomial_u128(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r.min(n - r)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `Σ_{i=1}^{⌊σk⌋} C(k,i) ≤ 2^{h(σ)k}` for every `k ≤ k_max` and
/// `σ ∈ {2/16, …, 7/16}`.
pub fn lemma_binom_bound(k_max: usize) -> LemmaCheck {
    let (mut cases, mut failures, mut min_margin) = (0, 0, f64::INFINITY);
    for k in 1..=k_max {
        for j in 2..8 {
            let sigma = j as f64 / 16.0;
            let top = (j * k) / 16;
            let lhs: u128 = (1..=top).map(|i| binomial_u128(k, i)).sum();
            let rhs_log = binary_entropy(sigma).expect("σ in (0, 1/2)") * k as f64;
            cases += 1;
            if lhs > 0 {
                let margin = rhs_log - (lhs as f64).log2();
                min_margin = min_margin.min(margin);
                failures += (margin < 0.0) as u64;
            }
        }
    }
    LemmaCheck { name: format!("binom-bound(k≤{k_max})"), cases, failures, min_margin, pass: failures == 0 }
}

/// Worst-case min-entropy of `Y` within distance `t` of an `s`-bit source on
/// `n` bits: the adversary moves every reachable string onto one target.
pub fn worst_case_noisy_entropy(n: usize, support: usize, t: usize) -> f64 {
    let support_mask = (1u64 << support) - 1;
    let mut best = 0u64;
    for y in 0..1u64 << n {
        let mut hits = 0;
        let mut x = 0u64;
        loop {
            hits += ((x ^ y).count_ones() as usize <= t) as u64;
            if x == support_mask {
                break;
            }
            x = (x.wrapping_sub(support_mask)) & support_mask;
        }
        best = best.max(hits);
    }
    support as f64 - (best as f64).log2()
}

/// `H∞(Y) ≥ (α − h(δ))n` for every noisy version `Y` of an `αn`-source
/// within distance `δn`, exhaustively for `n ≤ n_max` and `δ < 1/2`.
pub fn lemma_entropy_hd(n_max: usize) -> Result<LemmaCheck> {
    if n_max > 12 {
        return Err(Error::RegimeTooLarge(format!("entropy enumeration needs n ≤ 12 (got {n_max})")));
    }
    let (mut cases, mut failures, mut min_margin) = (0, 0, f64::INFINITY);
    for n in 1..=n_max {
        for support in 1..=n {
            for t in 0..n.div_ceil(2) {
                let h = worst_case_noisy_entropy(n, support, t);
                let claim = support as f64 - binary_entropy(t as f64 / n as f64)? * n as f64;
                cases += 1;
                let margin = h - claim;
                min_margin = min_margin.min(margin);
                failures += (margin < -1e-9) as u64;
            }
        }
    }
    Ok(LemmaCheck { name: format!("entropy-hd(n≤{n_max})"), cases, failures, min_margin, pass: failures == 0 })
}

/// Respondent behaviour in the target-set experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IhStrategy {
    /// Follows the protocol with an input drawn from the target set.
    Honest,
    /// Answers each query to keep as many target strings consistent as possible.
    Greedy,
}

/// Probability that both outputs of interactive hashing land in a random
/// target set of size `2^t`, against `2^{−(m−t)}` with the unknown-constant slack.
pub fn ih_target_attack<R: Rng + ?Sized>(
    m: usize,
    t: usize,
    runs: u64,
    strategy: IhStrategy,
    rng: &mut R,
) -> Result<AttackReport> {
    if !(2..=24).contains(&m) || t > m {
        return Err(Error::RegimeTooLarge(format!("target experiment needs 2 ≤ m ≤ 24, t ≤ m (m={m}, t={t})")));
    }
    let mut successes = 0;
    for _ in 0..runs {
        let target: Vec<u64> = index::sample(rng, 1 << m, 1 << t).iter().map(|v| v as u64).collect();
        let members: HashSet<u64> = target.iter().copied().collect();
        let (w0, w1) = match strategy {
            IhStrategy::Honest => {
                let w = BitString::from_u64(target[rng.gen_range(0..target.len())], m);
                let out = run_honest(&w, rng)?;
                (out.w0, out.w1)
            }
            IhStrategy::Greedy => {
                let mut alive = target.clone();
                let mut q = IhQuerier::new(m)?;
                while !q.is_complete() {
                    let b = to_word(&q.next_query(rng)?);
                    let ones = alive.iter().filter(|&&w| (w & b).count_ones() & 1 == 1).count();
                    let c = match (2 * ones).cmp(&alive.len()) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => rng.gen(),
                    };
                    alive.retain(|&w| ((w & b).count_ones() & 1 == 1) == c);
                    q.receive(c)?;
                }
                solve(m, q.queries(), q.responses())?
            }
        };
        successes += (members.contains(&to_word(&w0)) && members.contains(&to_word(&w1))) as u64;
    }
    let bound = 2f64.powi(-((m - t) as i32));
    let name = format!("ih-target-{}(m={m},t={t})", if strategy == IhStrategy::Honest { "honest" } else { "greedy" });
    Ok(AttackReport::new(name, runs, successes, bound, "2^(−(m−t))", UNKNOWN_CONSTANT_SLACK, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hashing::{strong_extract, ExtractorSeed, ToeplitzHash};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn packed_toeplitz_matches_bitstring_route() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..500 {
            let k = rng.gen_range(1..20);
            let d = rng.gen_range(1..10);
            let diag = BitString::random(k + d - 1, &mut rng);
            let x = BitString::random(k, &mut rng);
            let expected = ToeplitzHash::new(k, d, diag.clone()).unwrap().eval(&x).unwrap();
            let rows = toeplitz_rows(to_word(&diag), k, d);
            assert_eq!(apply_rows(&rows, to_word(&x)), to_word(&expected));
            let seed = ExtractorSeed(diag);
            assert_eq!(to_word(&strong_extract(&x, &seed, d).unwrap()), to_word(&expected));
        }
    }

    #[test]
    fn report_pass_is_derived() {
        let r = AttackReport::new("x", 100, 10, 0.04, "f", 2.0, 0.0);
        assert!(!r.pass);
        let r = AttackReport::new("x", 100, 8, 0.04, "f", 2.0, 0.0);
        assert!(r.pass);
        assert!(r.to_string().contains("pass=true"));
    }

    #[test]
    fn binding_exact_ball_has_no_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let r = binding_attack(BindingSetup { k: 16, digest_len: 12, sigma: 0.0 }, 50, &mut rng).unwrap();
        assert_eq!(r.successes, 0);
    }

    #[test]
    fn binding_wide_digest_resists() {
        // ω = 1.5 > 2h(0.125) + 0.3
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let s = BindingSetup { k: 16, digest_len: 24, sigma: 0.125 };
        assert!(s.omega() > 2.0 * binary_entropy(0.125).unwrap() + 0.3);
        let r = binding_attack(s, 200, &mut rng).unwrap();
        assert_eq!(r.successes, 0);
        assert!(r.pass);
    }

    #[test]
    fn binding_narrow_digest_breaks() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let r = binding_attack(BindingSetup { k: 16, digest_len: 4, sigma: 0.125 }, 100, &mut rng).unwrap();
        assert!(r.rate > 0.9, "{r}");
    }

    #[test]
    fn binding_sampled_regime_and_refusal() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let r = binding_attack(BindingSetup { k: 24, digest_len: 6, sigma: 0.125 }, 20, &mut rng).unwrap();
        assert!(r.rate > 0.9);
        assert!(binding_attack(BindingSetup { k: 40, digest_len: 6, sigma: 0.1 }, 1, &mut rng).is_err());
    }

    #[test]
    fn hiding_equal_values_give_zero() {
        let s = HidingSetup::prefix(8, 4, 1, 1, 0).unwrap();
        let r = hiding_distance(&s, 1, 1).unwrap();
        assert_eq!(r.distance, 0.0);
    }

    #[test]
    fn hiding_full_storage_reveals_value() {
        let s = HidingSetup::prefix(8, 4, 1, 1, 8).unwrap();
        let r = hiding_distance(&s, 0, 1).unwrap();
        assert!(r.min_entropy.abs() < 1e-12);
        // the adversary recomputes the pad, so Ω reveals v
        assert!((r.distance - 1.0).abs() < 1e-12, "{r}");
        assert!(!r.pass);
    }

    #[test]
    fn hiding_no_storage_within_bound() {
        let s = HidingSetup::prefix(8, 4, 1, 1, 0).unwrap();
        let r = hiding_distance(&s, 0, 1).unwrap();
        assert!(r.pass, "{r}");
        assert!(hiding_distance(&HidingSetup::prefix(14, 4, 1, 1, 0).unwrap(), 0, 1).is_err());
    }

    fn offbranch(code: LinearCode, budget: usize) -> OffBranchSetup {
        let n = 10;
        OffBranchSetup {
            n,
            a: IndexSet::new(n, vec![0, 1, 2, 3, 5, 6, 7, 8]).unwrap(),
            c_on: IndexSet::new(8, vec![0, 2, 4, 6]).unwrap(),
            c_off: IndexSet::new(8, vec![1, 3, 5, 7]).unwrap(),
            code,
            payload_len: 1,
            stored: IndexSet::new(n, (0..budget).collect()).unwrap(),
            stored_value: BitString::zeros(budget),
        }
    }

    #[test]
    fn offbranch_without_storage() {
        let r = ot_offbranch_distance(&offbranch(LinearCode::repetition(2).unwrap(), 0)).unwrap();
        // two repetition blocks leak two syndrome bits of four
        assert!((r.min_entropy - 2.0).abs() < 1e-9, "{r}");
        assert!(r.pass, "{r}");
        let id = ot_offbranch_distance(&offbranch(LinearCode::identity(4).unwrap(), 0)).unwrap();
        assert!((id.min_entropy - 4.0).abs() < 1e-9, "{id}");
        assert!(id.pass, "{id}");
    }

    #[test]
    fn offbranch_full_storage_breaks() {
        let r = ot_offbranch_distance(&offbranch(LinearCode::identity(4).unwrap(), 10)).unwrap();
        // one output bit fully determined: as far from uniform as it gets
        assert!((r.distance - 0.5).abs() < 1e-12, "{r}");
        assert!(r.min_entropy.abs() < 1e-12);
    }

    #[test]
    fn birthday_with_identical_sets() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let r = lemma_birthday(64, 16, 100, &mut rng).unwrap();
        // k = 64 = n: A = B = [n]
        assert_eq!(r.successes, 0);
        let r = lemma_birthday(4096, 1, 2000, &mut rng).unwrap();
        assert!(r.rate < r.bound / 4.0, "{r}");
    }

    #[test]
    fn subset_hd_edges() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (up, low) = lemma_subset_hd(200, 50, 0.0, 0.05, 200, &mut rng).unwrap();
        assert_eq!((up.successes, low.successes), (0, 0));
    }

    #[test]
    fn binom_bound_small_case() {
        // k = 8, σ = 1/4: 8 + 28 = 36 ≤ 2^{6.49}
        let lhs: u128 = (1..=2).map(|i| binomial_u128(8, i)).sum();
        assert_eq!(lhs, 36);
        assert!((36f64).log2() < binary_entropy(0.25).unwrap() * 8.0);
        assert!(lemma_binom_bound(12).pass);
    }

    #[test]
    fn entropy_hd_noiseless_is_source_entropy() {
        assert_eq!(worst_case_noisy_entropy(6, 3, 0), 3.0);
        for (n, s, t) in [(6, 4, 1), (7, 5, 2), (8, 3, 3)] {
            let ball: u128 = (0..=t).map(|i| binomial_u128(s, i)).sum();
            assert!((worst_case_noisy_entropy(n, s, t) - (s as f64 - (ball as f64).log2())).abs() < 1e-12);
        }
        // ball of radius 1 around a support string holds 1 + s members
        assert!((worst_case_noisy_entropy(6, 3, 1) - (3.0 - 4f64.log2())).abs() < 1e-12);
        assert!(lemma_entropy_hd(6).unwrap().pass);
    }

    #[test]
    fn target_experiment_small() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let r = ih_target_attack(6, 6, 50, IhStrategy::Honest, &mut rng).unwrap();
        assert_eq!(r.successes, 50, "T is everything");
        let r = ih_target_attack(6, 0, 200, IhStrategy::Greedy, &mut rng).unwrap();
        assert_eq!(r.successes, 0, "a single target cannot fill both outputs");
    }
}
