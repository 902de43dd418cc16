//! Bit-string commitment from a noisy public source.
//!
//! Alice (committer) and Bob (verifier) each keep `k` sampled bits of their
//! copy of the source. Bob sends a hash `g`; Alice commits to `v` with
//! `Ω = v ⊕ Ext(X^A, u)` and `g(X^A)`. To open she reveals `v` and `W = X^A`,
//! and Bob checks `W` against his own samples on `C = A ∩ B`.

use rand::Rng;

use crate::bits::{BitString, IndexSet};
use crate::error::{Error, Result};
use crate::hashing::{strong_extract, ExtractorSeed, ToeplitzHash};
use crate::infomath::CommitParams;
use crate::source::{sample_positions, SourcePair};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitMessage {
    pub omega: BitString,
    pub digest: BitString,
    pub a: IndexSet,
    pub u: ExtractorSeed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenMessage {
    pub v: BitString,
    pub w: BitString,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reason {
    Accepted,
    SmallIntersection,
    TooManyErrors,
    DigestMismatch,
    ValueMismatch,
    Malformed,
}

impl Reason {
    pub fn code(self) -> u8 {
        match self {
            Reason::Accepted => 0,
            Reason::SmallIntersection => 1,
            Reason::TooManyErrors => 2,
            Reason::DigestMismatch => 3,
            Reason::ValueMismatch => 4,
            Reason::Malformed => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => Reason::Accepted,
            1 => Reason::SmallIntersection,
            2 => Reason::TooManyErrors,
            3 => Reason::DigestMismatch,
            4 => Reason::ValueMismatch,
            5 => Reason::Malformed,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Accepted => "accepted",
            Reason::SmallIntersection => "small-intersection",
            Reason::TooManyErrors => "too-many-errors",
            Reason::DigestMismatch => "digest-mismatch",
            Reason::ValueMismatch => "value-mismatch",
            Reason::Malformed => "malformed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub accept: bool,
    pub reason: Reason,
    /// `|A ∩ B|`, when the messages were well formed.
    pub intersection: usize,
    /// `HD(W^C, X̃^C)`, when computed.
    pub mismatches: usize,
}

impl Verdict {
    fn reject(reason: Reason, intersection: usize, mismatches: usize) -> Self {
        Verdict { accept: false, reason, intersection, mismatches }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Phase {
    Fresh,
    Transmitted,
    Committed,
    Opened,
}

#[derive(Clone, Debug)]
pub struct Committer {
    params: CommitParams,
    v: BitString,
    phase: Phase,
    a: Option<IndexSet>,
    x_a: Option<BitString>,
}

impl Committer {
    pub fn new(params: CommitParams, v: BitString) -> Result<Self> {
        if v.len() != params.m {
            return Err(Error::LengthMismatch { left: v.len(), right: params.m });
        }
        Ok(Committer { params, v, phase: Phase::Fresh, a: None, x_a: None })
    }

    pub fn params(&self) -> &CommitParams {
        &self.params
    }

    /// Samples `A` and keeps only `X^A`.
    pub fn transmit<R: Rng + ?Sized>(&mut self, x: &BitString, rng: &mut R) -> Result<()> {
        if self.phase != Phase::Fresh {
            return Err(Error::State("transmission already done"));
        }
        if x.len() != self.params.n() {
            return Err(Error::LengthMismatch { left: x.len(), right: self.params.n() });
        }
        let a = sample_positions(self.params.n(), self.params.k, rng)?;
        self.x_a = Some(x.restrict(&a)?);
        self.a = Some(a);
        self.phase = Phase::Transmitted;
        Ok(())
    }

    /// Bits retained after transmission.
    pub fn stored_bits(&self) -> usize {
        self.x_a.as_ref().map_or(0, BitString::len)
    }

    pub fn sample(&self) -> Option<(&IndexSet, &BitString)> {
        self.a.as_ref().zip(self.x_a.as_ref())
    }

    pub fn commit<R: Rng + ?Sized>(&mut self, g: &ToeplitzHash, rng: &mut R) -> Result<CommitMessage> {
        if self.phase != Phase::Transmitted {
            return Err(Error::State("commit requires a completed transmission"));
        }
        let (k, digest_len) = (self.params.k, self.params.digest_len);
        if g.in_len() != k {
            return Err(Error::LengthMismatch { left: g.in_len(), right: k });
        }
        if g.out_len() != digest_len {
            return Err(Error::LengthMismatch { left: g.out_len(), right: digest_len });
        }
        let x_a = self.x_a.as_ref().expect("transmitted");
        let u = ExtractorSeed::random(k, self.params.m, rng);
        let y = strong_extract(x_a, &u, self.params.m)?;
        let msg = CommitMessage {
            omega: self.v.xor(&y)?,
            digest: g.eval(x_a)?,
            a: self.a.clone().expect("transmitted"),
            u,
        };
        self.phase = Phase::Committed;
        Ok(msg)
    }

    pub fn open(&mut self) -> Result<OpenMessage> {
        if self.phase != Phase::Committed {
            return Err(Error::State("open requires a commitment"));
        }
        self.phase = Phase::Opened;
        Ok(OpenMessage { v: self.v.clone(), w: self.x_a.clone().expect("transmitted") })
    }
}

#[derive(Clone, Debug)]
pub struct Verifier {
    params: CommitParams,
    phase: Phase,
    b: Option<IndexSet>,
    x_b: Option<BitString>,
    g: Option<ToeplitzHash>,
    commitment: Option<CommitMessage>,
}

impl Verifier {
    pub fn new(params: CommitParams) -> Self {
        Verifier { params, phase: Phase::Fresh, b: None, x_b: None, g: None, commitment: None }
    }

    pub fn params(&self) -> &CommitParams {
        &self.params
    }

    pub fn transmit<R: Rng + ?Sized>(&mut self, x_tilde: &BitString, rng: &mut R) -> Result<()> {
        if self.phase != Phase::Fresh {
            return Err(Error::State("transmission already done"));
        }
        if x_tilde.len() != self.params.n() {
            return Err(Error::LengthMismatch { left: x_tilde.len(), right: self.params.n() });
        }
        let b = sample_positions(self.params.n(), self.params.k, rng)?;
        self.x_b = Some(x_tilde.restrict(&b)?);
        self.b = Some(b);
        self.phase = Phase::Transmitted;
        Ok(())
    }

    pub fn stored_bits(&self) -> usize {
        self.x_b.as_ref().map_or(0, BitString::len)
    }

    pub fn sample(&self) -> Option<(&IndexSet, &BitString)> {
        self.b.as_ref().zip(self.x_b.as_ref())
    }

    /// Draws a fresh `g: {0,1}^k → {0,1}^{⌈ωk⌉}`.
    pub fn choose_hash<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<ToeplitzHash> {
        if self.phase != Phase::Transmitted || self.g.is_some() {
            return Err(Error::State("hash is chosen once, after transmission"));
        }
        let g = ToeplitzHash::random(self.params.k, self.params.digest_len, rng)?;
        self.g = Some(g.clone());
        Ok(g)
    }

    pub fn receive_commitment(&mut self, msg: CommitMessage) -> Result<()> {
        if self.phase != Phase::Transmitted || self.g.is_none() {
            return Err(Error::State("commitment arrives after the hash is sent"));
        }
        self.commitment = Some(msg);
        self.phase = Phase::Committed;
        Ok(())
    }

    fn well_formed(&self, c: &CommitMessage, o: &OpenMessage) -> bool {
        let p = &self.params;
        c.omega.len() == p.m
            && c.digest.len() == p.digest_len
            && c.a.ground() == p.n()
            && c.a.len() == p.k
            && c.u.bits().len() == p.seed_len()
            && o.v.len() == p.m
            && o.w.len() == p.k
    }

    /// Accepts iff `|C| ≥ ℓ`, `HD(W^C, X̃^C) ≤ ⌊(δ+ζ)|C|⌋`, `g(W)` matches the
    /// digest, and `v′ = Ext(W, u) ⊕ Ω`; checked in that order.
    pub fn verify_open(&mut self, open: &OpenMessage) -> Result<Verdict> {
        if self.phase != Phase::Committed {
            return Err(Error::State("open requires a commitment"));
        }
        self.phase = Phase::Opened;
        let c_msg = self.commitment.as_ref().expect("committed");
        if !self.well_formed(c_msg, open) {
            return Ok(Verdict::reject(Reason::Malformed, 0, 0));
        }
        let b = self.b.as_ref().expect("transmitted");
        let x_b = self.x_b.as_ref().expect("transmitted");
        let c = c_msg.a.intersect(b)?;
        if c.len() < self.params.ell() {
            return Ok(Verdict::reject(Reason::SmallIntersection, c.len(), 0));
        }
        let w_c = open.w.restrict(&c_msg.a.relative(&c)?)?;
        let x_c = x_b.restrict(&b.relative(&c)?)?;
        let mismatches = w_c.hamming(&x_c)?;
        let allowed = (self.params.sigma() * c.len() as f64 + 1e-9).floor() as usize;
        if mismatches > allowed {
            return Ok(Verdict::reject(Reason::TooManyErrors, c.len(), mismatches));
        }
        let g = self.g.as_ref().expect("hash chosen");
        if g.eval(&open.w)? != c_msg.digest {
            return Ok(Verdict::reject(Reason::DigestMismatch, c.len(), mismatches));
        }
        let expected = strong_extract(&open.w, &c_msg.u, self.params.m)?.xor(&c_msg.omega)?;
        if expected != open.v {
            return Ok(Verdict::reject(Reason::ValueMismatch, c.len(), mismatches));
        }
        Ok(Verdict { accept: true, reason: Reason::Accepted, intersection: c.len(), mismatches })
    }
}

/// A one-bit deviation applied to the opening.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tamper {
    None,
    Value(usize),
    Word(usize),
}

impl Tamper {
    pub fn apply(self, open: &mut OpenMessage) -> Result<()> {
        match self {
            Tamper::None => Ok(()),
            Tamper::Value(i) => open.v.flip(i),
            Tamper::Word(i) => open.w.flip(i),
        }
    }
}

/// Runs a full session in-process with separate randomness for each party.
pub fn simulate<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    params: &CommitParams,
    pair: &SourcePair,
    v: &BitString,
    tamper: Tamper,
    alice_rng: &mut R1,
    bob_rng: &mut R2,
) -> Result<Verdict> {
    let mut alice = Committer::new(params.clone(), v.clone())?;
    let mut bob = Verifier::new(params.clone());
    alice.transmit(&pair.x, alice_rng)?;
    bob.transmit(&pair.x_tilde, bob_rng)?;
    let g = bob.choose_hash(bob_rng)?;
    bob.receive_commitment(alice.commit(&g, alice_rng)?)?;
    let mut open = alice.open()?;
    tamper.apply(&mut open)?;
    bob.verify_open(&open)
}
