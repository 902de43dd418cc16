//! Entropy calculus, distances between explicit distributions, and the
//! parameter inequalities both protocols must satisfy.
//!
//! All logarithms are base 2.

use std::collections::HashMap;
use std::hash::Hash;

use crate::codes::LinearCode;
use crate::error::{Error, Result};

/// `h(x) = -x log x - (1-x) log(1-x)`, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain { value: x, domain: "[0, 1]" });
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

fn h(x: f64) -> f64 {
    binary_entropy(x).expect("argument checked by caller")
}

/// The unique `x` in `[0, 1/2]` with `h(x) = y`, by bisection.
pub fn inv_binary_entropy(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain { value: y, domain: "[0, 1]" });
    }
    // h is flat to double precision within ~1e-8 of 1/2.
    if y == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    // 60 halvings take the bracket below 1e-18.
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A finite distribution with distinct outcomes.
#[derive(Clone, Debug)]
pub struct Distribution<V> {
    outcomes: Vec<(V, f64)>,
}

impl<V: Eq + Hash + Clone> Distribution<V> {
    pub fn new(outcomes: Vec<(V, f64)>) -> Result<Self> {
        if outcomes.iter().any(|(_, p)| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution("negative or non-finite probability"));
        }
        let total: f64 = outcomes.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution("probabilities do not sum to 1"));
        }
        let mut seen = std::collections::HashSet::with_capacity(outcomes.len());
        if !outcomes.iter().all(|(v, _)| seen.insert(v)) {
            return Err(Error::InvalidDistribution("repeated outcome"));
        }
        Ok(Distribution { outcomes })
    }

    pub fn uniform<I: IntoIterator<Item = V>>(values: I) -> Result<Self> {
        let values: Vec<V> = values.into_iter().collect();
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empty support"));
        }
        let p = 1.0 / values.len() as f64;
        Distribution::new(values.into_iter().map(|v| (v, p)).collect())
    }

    pub fn point(value: V) -> Self {
        Distribution { outcomes: vec![(value, 1.0)] }
    }

    /// Normalises integer weights (e.g. enumeration counts).
    pub fn from_counts<I: IntoIterator<Item = (V, u64)>>(counts: I) -> Result<Self> {
        let counts: Vec<(V, u64)> = counts.into_iter().collect();
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        if total == 0 {
            return Err(Error::InvalidDistribution("empty support"));
        }
        Distribution::new(counts.into_iter().map(|(v, c)| (v, c as f64 / total as f64)).collect())
    }

    pub fn outcomes(&self) -> &[(V, f64)] {
        &self.outcomes
    }

    pub fn prob(&self, value: &V) -> f64 {
        self.outcomes.iter().find(|(v, _)| v == value).map_or(0.0, |(_, p)| *p)
    }
}

/// Half the L1 distance; outcomes missing from one side count as probability 0.
pub fn statistical_distance<V: Eq + Hash + Clone>(p: &Distribution<V>, q: &Distribution<V>) -> f64 {
    let mut diff: HashMap<&V, f64> = HashMap::new();
    for (v, pr) in &p.outcomes {
        *diff.entry(v).or_default() += pr;
    }
    for (v, pr) in &q.outcomes {
        *diff.entry(v).or_default() -= pr;
    }
    0.5 * diff.values().map(|d| d.abs()).sum::<f64>()
}

pub fn min_entropy<V: Eq + Hash + Clone>(p: &Distribution<V>) -> Result<f64> {
    let max = p.outcomes.iter().map(|(_, pr)| *pr).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::InvalidDistribution("empty support"));
    }
    Ok(-max.log2())
}

/// `min_y min_x -log P(x | y)` over a joint distribution of `(x, y)` pairs.
pub fn cond_min_entropy<X, Y>(joint: &Distribution<(X, Y)>) -> Result<f64>
where
    X: Eq + Hash + Clone,
    Y: Eq + Hash + Clone,
{
    let mut marginal: HashMap<&Y, f64> = HashMap::new();
    let mut peak: HashMap<&Y, f64> = HashMap::new();
    for ((_, y), pr) in &joint.outcomes {
        *marginal.entry(y).or_default() += pr;
        let e = peak.entry(y).or_default();
        *e = e.max(*pr);
    }
    let worst = marginal
        .iter()
        .filter(|(_, &py)| py > 0.0)
        .map(|(y, py)| peak[y] / py)
        .fold(0.0, f64::max);
    if worst == 0.0 {
        return Err(Error::InvalidDistribution("empty support"));
    }
    Ok(-worst.log2())
}

/// Min-entropy rate left after conditioning on `γn` stored bits:
/// `α − γ − (1 + log(1/ε′)) / n`. May be non-positive.
pub fn rho(alpha: f64, gamma: f64, eps_prime: f64, n: usize) -> f64 {
    alpha - gamma - (1.0 + (1.0 / eps_prime).log2()) / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Slack of the defining inequality; positive exactly when feasible.
    pub margin: f64,
}

/// Commitment needs `2h(δ) < α − γ`.
pub fn commit_feasible(entropy_gap: f64, delta: f64) -> Result<Feasibility> {
    let margin = entropy_gap - 2.0 * binary_entropy(delta)?;
    Ok(Feasibility { feasible: margin > 0.0, margin })
}

/// Oblivious transfer with a Gilbert–Varshamov code needs `h(2δ) < α − γ`.
pub fn ot_feasible_gv(entropy_gap: f64, delta: f64) -> Result<Feasibility> {
    if !(0.0..0.25).contains(&delta) {
        return Err(Error::Domain { value: delta, domain: "[0, 1/4)" });
    }
    let margin = entropy_gap - binary_entropy(2.0 * delta)?;
    Ok(Feasibility { feasible: margin > 0.0, margin })
}

/// Largest commitment error rate: `h⁻¹((α−γ)/2)`.
pub fn commit_delta_threshold(entropy_gap: f64) -> Result<f64> {
    inv_binary_entropy(entropy_gap / 2.0)
}

/// Largest OT error rate under the Gilbert–Varshamov bound: `h⁻¹(α−γ)/2`.
pub fn ot_gv_delta_threshold(entropy_gap: f64) -> Result<f64> {
    Ok(inv_binary_entropy(entropy_gap)? / 2.0)
}

fn zyablov_objective(rate: f64, theta: f64, r: f64) -> f64 {
    let y = inv_binary_entropy((1.0 - rate / r).clamp(0.0, 1.0)).expect("clamped");
    (1.0 - r - theta) * y / 2.0
}

/// Correctable error fraction of the concatenated code family at rate `R`:
/// `max over R < r < 1 of (1 − r − θ) y / 2` where `h(y) = 1 − R/r`.
///
/// Grid scan at step 1e-3, then golden-section refinement around the best
/// grid point. Clamped below at 0.
pub fn zyablov_delta(rate: f64, theta: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::Domain { value: rate, domain: "(0, 1)" });
    }
    if !(theta >= 0.0) {
        return Err(Error::Domain { value: theta, domain: "[0, ∞)" });
    }
    let f = |r: f64| zyablov_objective(rate, theta, r);
    let step = 1e-3;
    let mut best_r = rate;
    let mut best = f64::NEG_INFINITY;
    let mut r = rate + step;
    while r < 1.0 {
        let v = f(r);
        if v > best {
            best = v;
            best_r = r;
        }
        r += step;
    }
    let (mut a, mut b) = ((best_r - step).max(rate), (best_r + step).min(1.0));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    for _ in 0..80 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    Ok(best.max(f(0.5 * (a + b))).max(0.0))
}

fn require(cond: bool, inequality: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Infeasible(inequality.to_string()))
    }
}

/// `2√(ℓn)` rounded down to an even integer.
pub fn sample_size(n: usize, ell: usize) -> usize {
    let k = (2.0 * ((ell as f64) * (n as f64)).sqrt()).floor() as usize;
    k & !1
}

/// Base inputs of the commitment scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct CommitInputs {
    pub n: usize,
    pub ell: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub zeta: f64,
    pub tau: f64,
    pub omega: f64,
    pub psi_ext: f64,
    pub eps_prime: f64,
}

impl CommitInputs {
    /// Fills `τ` and `ω` from the gap `ρ − 2h(δ+ζ)`: `τ` takes a tenth of the
    /// gap, `ω` sits a tenth above `2h(δ+ζ)`, and the remaining six tenths
    /// go to the extractor.
    pub fn auto(n: usize, ell: usize, alpha: f64, gamma: f64, delta: f64, zeta: f64) -> Result<Self> {
        let eps_prime = 2f64.powi(-32);
        let rho = rho(alpha, gamma, eps_prime, n);
        let sigma = delta + zeta;
        require((0.0..0.5).contains(&sigma), "δ+ζ < 1/2")?;
        let floor = 2.0 * h(sigma);
        let gap = rho - floor;
        require(gap > 0.0, "2h(δ+ζ) < ρ")?;
        Ok(CommitInputs {
            n,
            ell,
            alpha,
            gamma,
            delta,
            zeta,
            tau: gap / 10.0,
            omega: floor + gap / 10.0,
            psi_ext: 0.1,
            eps_prime,
        })
    }

    pub fn derive(&self) -> Result<CommitParams> {
        derive_commit_params(self)
    }
}

/// Commitment parameters with every derived quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct CommitParams {
    pub inputs: CommitInputs,
    /// Positions sampled by each party.
    pub k: usize,
    pub rho: f64,
    /// Bits of the digest `g(X^A)`, `⌈ωk⌉`.
    pub digest_len: usize,
    /// Min-entropy left for the extractor, `⌊(ρ − 3τ − ω)k⌋`.
    pub k_e: usize,
    /// Committed string length, `⌊(1 − ψ)k_E⌋`.
    pub m: usize,
}

impl CommitParams {
    pub fn n(&self) -> usize {
        self.inputs.n
    }

    pub fn ell(&self) -> usize {
        self.inputs.ell
    }

    /// Bob's per-bit error tolerance `δ + ζ`.
    pub fn sigma(&self) -> f64 {
        self.inputs.delta + self.inputs.zeta
    }

    /// Extractor seed length `k + m − 1`.
    pub fn seed_len(&self) -> usize {
        self.k + self.m - 1
    }
}

pub fn derive_commit_params(inp: &CommitInputs) -> Result<CommitParams> {
    require(inp.n >= 1, "n ≥ 1")?;
    require(inp.alpha > 0.0 && inp.alpha <= 1.0, "0 < α ≤ 1")?;
    require(inp.gamma >= 0.0 && inp.gamma < inp.alpha, "0 ≤ γ < α")?;
    require(inp.delta >= 0.0 && inp.zeta > 0.0, "δ ≥ 0, ζ > 0")?;
    require(inp.delta + inp.zeta < 0.5, "δ+ζ < 1/2")?;
    require(inp.eps_prime > 0.0 && inp.eps_prime < 1.0, "0 < ε′ < 1")?;
    require(inp.psi_ext > 0.0 && inp.psi_ext < 1.0, "0 < ψ < 1")?;
    let rho = rho(inp.alpha, inp.gamma, inp.eps_prime, inp.n);
    require(rho > 0.0, "ρ > 0")?;
    require(inp.tau > 0.0 && inp.tau <= rho / 3.0, "0 < τ ≤ ρ/3")?;
    require(inp.omega < rho - 3.0 * inp.tau, "ω < ρ − 3τ")?;
    require(2.0 * h(inp.delta + inp.zeta) < inp.omega, "2h(δ+ζ) < ω")?;
    require(inp.ell >= 1, "ℓ ≥ 1")?;
    let k = sample_size(inp.n, inp.ell);
    require(k <= inp.n, "k ≤ n")?;
    require(inp.ell <= k, "ℓ ≤ k")?;
    let digest_len = (inp.omega * k as f64).ceil() as usize;
    let k_e = ((rho - 3.0 * inp.tau - inp.omega) * k as f64).floor() as usize;
    let m = ((1.0 - inp.psi_ext) * k_e as f64).floor() as usize;
    require(m >= 1, "m ≥ 1")?;
    Ok(CommitParams { inputs: inp.clone(), k, rho, digest_len, k_e, m })
}

/// Base inputs of the oblivious-transfer protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct OtInputs {
    pub n: usize,
    pub ell: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub xi: f64,
    /// Slack exponent of the interactive-hashing security parameter `t`.
    pub zeta_ih: f64,
    pub tau: f64,
    pub m_f: f64,
    pub eps_prime: f64,
    pub eps_hat: f64,
}

impl OtInputs {
    /// Desk-scale defaults: `ξ = 0.1`, `τ = 0.01`, one payload bit per
    /// 14 sampled bits, `ε̂ = 1/8`.
    pub fn with_defaults(n: usize, ell: usize, alpha: f64, gamma: f64, delta: f64) -> Self {
        OtInputs {
            n,
            ell,
            alpha,
            gamma,
            delta,
            xi: 0.1,
            zeta_ih: 0.5,
            tau: 0.01,
            m_f: 1.0 / 14.0,
            eps_prime: 2f64.powi(-32),
            eps_hat: 0.125,
        }
    }

    pub fn derive(&self, code: &LinearCode) -> Result<OtParams> {
        derive_ot_params(self, code)
    }
}

#[derive(Clone, Debug)]
pub struct OtParams {
    pub inputs: OtInputs,
    pub code: LinearCode,
    pub k: usize,
    pub rho: f64,
    /// Sampler failure term `e^{−ℓν²/2}` with `ν = τ / log(1/τ)`.
    pub eps_sampler: f64,
    /// Interactive-hashing string length `2ℓ⌈log k⌉`.
    pub m: usize,
    pub t: usize,
    pub k_f: f64,
    /// Helper-string length `(1 − R)ℓ`.
    pub p: usize,
    /// Length of `s_0`, `s_1`: `⌊m_F ℓ⌋`.
    pub payload_len: usize,
}

impl OtParams {
    pub fn n(&self) -> usize {
        self.inputs.n
    }

    pub fn ell(&self) -> usize {
        self.inputs.ell
    }

    /// Fuzzy-extractor seed length `ℓ + payload − 1`.
    pub fn seed_len(&self) -> usize {
        self.inputs.ell + self.payload_len - 1
    }
}

fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

pub fn derive_ot_params(inp: &OtInputs, code: &LinearCode) -> Result<OtParams> {
    require(inp.n >= 1, "n ≥ 1")?;
    require(inp.alpha > 0.0 && inp.alpha <= 1.0, "0 < α ≤ 1")?;
    require(inp.gamma >= 0.0 && inp.gamma < inp.alpha, "0 ≤ γ < α")?;
    require(inp.delta >= 0.0 && inp.delta < 0.25, "0 ≤ δ < 1/4")?;
    require(inp.xi > 0.0, "ξ > 0")?;
    require(inp.zeta_ih > 0.0 && inp.zeta_ih < 1.0, "0 < ζ < 1")?;
    require(inp.m_f > 0.0 && inp.m_f < 1.0, "0 < m_F < 1")?;
    require(inp.eps_prime > 0.0 && inp.eps_prime < 1.0, "0 < ε′ < 1")?;
    require(inp.eps_hat > 0.0 && inp.eps_hat < 1.0, "0 < ε̂ < 1")?;
    let rho = rho(inp.alpha, inp.gamma, inp.eps_prime, inp.n);
    require(rho > 0.0, "ρ > 0")?;
    require(inp.tau > 0.0 && inp.tau <= rho / 3.0, "0 < τ ≤ ρ/3")?;
    require(inp.ell >= 1, "ℓ ≥ 1")?;
    let k = sample_size(inp.n, inp.ell);
    require(k <= inp.n, "k ≤ n")?;
    require(inp.ell <= k, "ℓ ≤ k")?;
    require(inp.ell.is_multiple_of(code.length()), "code length divides ℓ")?;
    let radius_fraction = code.radius() as f64 / code.length() as f64;
    require(inp.delta + inp.xi <= radius_fraction, "δ+ξ ≤ radius/ℓ_c")?;

    let ell = inp.ell as f64;
    let rate = code.rate();
    let k_f = rho + rate - 3.0 * inp.tau - 2.0 * inp.m_f - 1.0 - (1.0 + (1.0 / inp.eps_hat).log2()) / ell;
    require(k_f > 0.0, "k_F > 0")?;
    let payload_len = (inp.m_f * ell).floor() as usize;
    require(payload_len >= 1, "⌊m_F·ℓ⌋ ≥ 1")?;

    let m = 2 * inp.ell * ceil_log2(k);
    let nu = inp.tau / (1.0 / inp.tau).log2();
    let eps_sampler = (-ell * nu * nu / 2.0).exp();
    let slack = (inp.zeta_ih * (1.0 / (inp.eps_prime + eps_sampler).min(1.0)).log2()).ceil() as usize;
    let t = m.saturating_sub(slack);
    let p = (inp.ell / code.length()) * code.redundancy();

    Ok(OtParams {
        inputs: inp.clone(),
        code: code.clone(),
        k,
        rho,
        eps_sampler,
        m,
        t,
        k_f,
        p,
        payload_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS32: f64 = 1.0 / 4294967296.0;

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        // 0.25·2 + 0.75·log(4/3)
        let direct = 0.5 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((binary_entropy(0.25).unwrap() - direct).abs() < 1e-15);
        assert!((binary_entropy(0.25).unwrap() - 0.8112781).abs() < 1e-7);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn inverse_entropy_examples() {
        assert!(inv_binary_entropy(0.0).unwrap() < 1e-15);
        assert!((inv_binary_entropy(1.0).unwrap() - 0.5).abs() < 1e-12);
        let x = inv_binary_entropy(0.5).unwrap();
        assert!((x - 0.1100278).abs() < 1e-7);
        assert!((binary_entropy(x).unwrap() - 0.5).abs() < 1e-9);
        assert!(inv_binary_entropy(2.0).is_err());
    }

    #[test]
    fn statistical_distance_examples() {
        let p = Distribution::new(vec![("a", 0.5), ("b", 0.5)]).unwrap();
        let q = Distribution::new(vec![("a", 0.75), ("b", 0.25)]).unwrap();
        assert_eq!(statistical_distance(&p, &p), 0.0);
        assert!((statistical_distance(&p, &q) - 0.25).abs() < 1e-15);
        let r = Distribution::new(vec![("c", 1.0)]).unwrap();
        assert!((statistical_distance(&p, &r) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![(1, 0.5), (2, 0.4)]).is_err());
        assert!(Distribution::new(vec![(1, -0.5), (2, 1.5)]).is_err());
        assert!(Distribution::new(vec![(1, 0.5), (1, 0.5)]).is_err());
        assert!(Distribution::<u8>::uniform(vec![]).is_err());
    }

    #[test]
    fn min_entropy_examples() {
        let u = Distribution::uniform(0..8u32).unwrap();
        assert!((min_entropy(&u).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(min_entropy(&Distribution::point(7)).unwrap(), 0.0);
        let d = Distribution::new(vec![('a', 0.5), ('b', 0.25), ('c', 0.25)]).unwrap();
        assert!((min_entropy(&d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_min_entropy_takes_worst_condition() {
        // y=0: x uniform over 4 values; y=1: x fixed.
        let mut joint: Vec<((u8, u8), f64)> = (0..4).map(|x| ((x, 0), 0.125)).collect();
        joint.push(((0, 1), 0.5));
        let joint = Distribution::new(joint).unwrap();
        assert_eq!(cond_min_entropy(&joint).unwrap(), 0.0);
        let only_uniform =
            Distribution::new((0..4u8).map(|x| ((x, 0u8), 0.25)).collect()).unwrap();
        assert!((cond_min_entropy(&only_uniform).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rho_examples() {
        let expected = 0.75 - 33.0 / 4096.0;
        assert!((rho(1.0, 0.25, EPS32, 4096) - expected).abs() < 1e-12);
        assert!((rho(1.0, 0.25, EPS32, 4096) - 0.7419433).abs() < 1e-7);
        assert!(rho(0.6, 0.6, 0.5, 100) < 0.0);
        assert!((rho(1.0, 0.0, 0.5, 4096) - (1.0 - 2.0 / 4096.0)).abs() < 1e-15);
    }

    #[test]
    fn commitment_feasibility_examples() {
        let f = commit_feasible(0.75, 0.05).unwrap();
        assert!(f.feasible);
        assert!((f.margin - (0.75 - 2.0 * binary_entropy(0.05).unwrap())).abs() < 1e-15);
        assert_eq!((f.margin * 1e4).round() / 1e4, 0.1772);
        assert!(!commit_feasible(0.75, 0.25).unwrap().feasible);
        assert!(commit_feasible(0.01, 0.0).unwrap().feasible);
    }

    #[test]
    fn ot_gv_feasibility_examples() {
        assert!(ot_feasible_gv(0.5, 0.05).unwrap().feasible);
        assert!(!ot_feasible_gv(0.5, 0.06).unwrap().feasible);
        assert!(ot_feasible_gv(0.001, 0.0).unwrap().feasible);
        assert!(ot_feasible_gv(0.5, 0.25).is_err());
    }

    /// Independent oracle: dense grid over r at step 1e-5 using a separate
    /// bisection for the inverse entropy.
    fn zyablov_grid_oracle(rate: f64, theta: f64) -> f64 {
        fn inv(y: f64) -> f64 {
            let (mut lo, mut hi) = (0.0, 0.5);
            for _ in 0..100 {
                let mid = (lo + hi) / 2.0;
                let hm = if mid == 0.0 { 0.0 } else { -mid * f64::log2(mid) - (1.0 - mid) * f64::log2(1.0 - mid) };
                if hm < y { lo = mid } else { hi = mid }
            }
            lo
        }
        let mut best = 0.0f64;
        let steps = ((1.0 - rate) / 1e-5) as usize;
        for i in 1..steps {
            let r = rate + i as f64 * 1e-5;
            best = best.max((1.0 - r - theta) * inv(1.0 - rate / r) / 2.0);
        }
        best
    }

    #[test]
    fn zyablov_examples() {
        let v = zyablov_delta(0.5, 0.0).unwrap();
        assert!(v > 0.0 && v < 0.11, "{v}");
        assert!((v - zyablov_grid_oracle(0.5, 0.0)).abs() < 1e-4);
        assert!(zyablov_delta(0.999, 0.0).unwrap() < 1e-3);
        for i in 1..10 {
            let r = i as f64 / 10.0;
            let z = zyablov_delta(r, 0.0).unwrap();
            assert!((z - zyablov_grid_oracle(r, 0.0)).abs() < 1e-4);
            assert!(z <= inv_binary_entropy(1.0 - r).unwrap() / 2.0);
        }
        assert!(zyablov_delta(0.0, 0.0).is_err());
    }

    fn example_inputs() -> CommitInputs {
        CommitInputs {
            n: 4096,
            ell: 16,
            alpha: 1.0,
            gamma: 0.25,
            delta: 0.02,
            zeta: 0.05,
            tau: 0.1,
            omega: 0.5,
            psi_ext: 0.1,
            eps_prime: EPS32,
        }
    }

    #[test]
    fn derive_commit_rejects_large_omega() {
        let err = example_inputs().derive().unwrap_err();
        assert_eq!(err, Error::Infeasible("ω < ρ − 3τ".into()));
    }

    #[test]
    fn derive_commit_rejects_small_omega() {
        // Satisfies ω < ρ − 3τ but 2h(0.07) ≈ 0.732 > 0.35.
        let inp = CommitInputs { tau: 0.05, omega: 0.35, ..example_inputs() };
        assert_eq!(inp.derive().unwrap_err(), Error::Infeasible("2h(δ+ζ) < ω".into()));
    }

    #[test]
    fn derive_commit_formula_chain() {
        let inp = CommitInputs { tau: 0.05, omega: 0.35, delta: 0.0, zeta: 0.01, ..example_inputs() };
        let p = inp.derive().unwrap();
        assert_eq!(p.k, 512);
        // (0.741943… − 0.15 − 0.35)·512 = 123.87…
        assert_eq!(p.k_e, 123);
        assert_eq!(p.m, 110);
        assert_eq!(p.digest_len, 180);
    }

    #[test]
    fn sample_size_rounds_to_even() {
        assert_eq!(sample_size(4096, 16), 512);
        assert_eq!(sample_size(4096, 14), 478);
        assert_eq!(sample_size(100, 2), 28);
        assert_eq!(sample_size(64, 64), 128);
    }

    #[test]
    fn auto_commit_inputs_are_feasible() {
        let p = CommitInputs::auto(4096, 16, 1.0, 0.25, 0.02, 0.05).unwrap().derive().unwrap();
        assert_eq!(p.k, 512);
        assert!(p.m >= 1);
        assert!(CommitInputs::auto(4096, 16, 1.0, 0.25, 0.2, 0.05).is_err());
    }

    #[test]
    fn derive_ot_params_desk_scale() {
        let code = LinearCode::hamming74();
        let p = OtInputs::with_defaults(4096, 14, 1.0, 0.05, 0.01).derive(&code).unwrap();
        assert_eq!(p.k, 478);
        assert_eq!(p.m, 2 * 14 * 9);
        assert_eq!(p.p, 6);
        assert_eq!(p.payload_len, 1);
        assert!(p.k_f > 0.0);
        assert!(p.t <= p.m);
        let too_noisy = OtInputs { delta: 0.1, ..OtInputs::with_defaults(4096, 14, 1.0, 0.05, 0.01) };
        assert_eq!(too_noisy.derive(&code).unwrap_err(), Error::Infeasible("δ+ξ ≤ radius/ℓ_c".into()));
        let misaligned = OtInputs::with_defaults(4096, 15, 1.0, 0.05, 0.01);
        assert!(misaligned.derive(&code).is_err());
    }

    proptest! {
        #[test]
        fn entropy_symmetric_and_concave(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
            let hx = binary_entropy(x).unwrap();
            prop_assert!((hx - binary_entropy(1.0 - x).unwrap()).abs() < 1e-12);
            let mid = binary_entropy((x + y) / 2.0).unwrap();
            prop_assert!(mid + 1e-12 >= (hx + binary_entropy(y).unwrap()) / 2.0);
            prop_assert!((0.0..=1.0).contains(&hx));
        }

        #[test]
        fn inverse_round_trip(x in 0.0f64..=0.5) {
            let back = inv_binary_entropy(binary_entropy(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() < 1e-8);
        }

        #[test]
        fn statistical_distance_triangle(a in prop::collection::vec(1u32..100, 4), b in prop::collection::vec(1u32..100, 4), c in prop::collection::vec(1u32..100, 4)) {
            let mk = |w: &Vec<u32>| Distribution::from_counts(w.iter().enumerate().map(|(i, &c)| (i, c as u64))).unwrap();
            let (p, q, r) = (mk(&a), mk(&b), mk(&c));
            let pq = statistical_distance(&p, &q);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
            prop_assert!(statistical_distance(&p, &r) <= pq + statistical_distance(&q, &r) + 1e-12);
        }

        #[test]
        fn derived_commit_params_satisfy_invariants(
            ell in 1usize..40, delta in 0.0f64..0.1, zeta in 0.01f64..0.2,
            tau in 0.001f64..0.2, omega in 0.0f64..1.0, gamma in 0.0f64..0.5,
        ) {
            let inp = CommitInputs { n: 4096, ell, alpha: 1.0, gamma, delta, zeta, tau, omega, psi_ext: 0.1, eps_prime: EPS32 };
            if let Ok(p) = inp.derive() {
                let s = p.sigma();
                prop_assert!(2.0 * binary_entropy(s).unwrap() < omega);
                prop_assert!(omega < p.rho - 3.0 * tau);
                prop_assert!(s < 0.5 && p.rho > 0.0);
                prop_assert!(p.k <= 4096 && p.ell() <= p.k && p.k % 2 == 0);
                prop_assert!(p.m >= 1 && p.m <= p.k_e);
            }
        }
    }
}
