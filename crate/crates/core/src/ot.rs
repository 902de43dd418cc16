//! One-out-of-two string oblivious transfer from a noisy public source.
//!
//! Setup: Alice announces `A`; Bob picks an `ℓ`-subset `C` of `A ∩ B`,
//! densely encodes its positions within `A` as `W`, and the two run
//! interactive hashing on `W`. Both decode the two outputs to `C_0, C_1`,
//! and Bob learns the `d` with `C_d = C`.
//!
//! Transfer: Bob sends `e = c ⊕ d`. Alice masks `s_{i⊕e}` with a fuzzy
//! extraction of `X^{C_i}`; Bob can only unmask branch `d`.

use num_bigint::BigUint;
use rand::seq::index;
use rand::Rng;

use crate::bits::{BitString, IndexSet};
use crate::codes::FuzzyExtractor;
use crate::error::{Error, Result};
use crate::hashing::ExtractorSeed;
use crate::ihash::{IhQuerier, IhRespondent};
use crate::infomath::OtParams;
use crate::source::{sample_positions, SourcePair};
use crate::subsets::DenseCode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AbortReason {
    SmallIntersection,
    InvalidEncoding,
    MalformedMessage,
}

impl AbortReason {
    pub fn code(self) -> u8 {
        match self {
            AbortReason::SmallIntersection => 1,
            AbortReason::InvalidEncoding => 2,
            AbortReason::MalformedMessage => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(AbortReason::SmallIntersection),
            2 => Some(AbortReason::InvalidEncoding),
            3 => Some(AbortReason::MalformedMessage),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AbortReason::SmallIntersection => "small-intersection",
            AbortReason::InvalidEncoding => "invalid-encoding",
            AbortReason::MalformedMessage => "malformed-message",
        }
    }
}

/// Both masked branches with their extractor seeds and helper strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Payload {
    pub z: [BitString; 2],
    pub r: [ExtractorSeed; 2],
    pub p: [BitString; 2],
}

/// Absolute positions of `relative` inside `a`: `{a[j] : j ∈ relative}`.
pub fn index_map(a: &IndexSet, relative: &IndexSet) -> Result<IndexSet> {
    a.select(relative)
}

fn fuzzy_extractor(params: &OtParams) -> Result<FuzzyExtractor> {
    FuzzyExtractor::new(params.code.clone(), params.ell(), params.payload_len)
}

fn dense_code(params: &OtParams) -> Result<DenseCode> {
    DenseCode::new(params.k, params.ell(), params.m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SenderPhase {
    Fresh,
    Transmitted,
    Hashing,
    Ready,
    Done,
    Aborted,
}

#[derive(Clone, Debug)]
pub struct Sender {
    params: OtParams,
    dense: DenseCode,
    fe: FuzzyExtractor,
    s: [BitString; 2],
    phase: SenderPhase,
    a: Option<IndexSet>,
    x_a: Option<BitString>,
    querier: Option<IhQuerier>,
    branches: Option<[IndexSet; 2]>,
    abort: Option<AbortReason>,
}

impl Sender {
    pub fn new(params: OtParams, s0: BitString, s1: BitString) -> Result<Self> {
        for s in [&s0, &s1] {
            if s.len() != params.payload_len {
                return Err(Error::LengthMismatch { left: s.len(), right: params.payload_len });
            }
        }
        Ok(Sender {
            dense: dense_code(&params)?,
            fe: fuzzy_extractor(&params)?,
            params,
            s: [s0, s1],
            phase: SenderPhase::Fresh,
            a: None,
            x_a: None,
            querier: None,
            branches: None,
            abort: None,
        })
    }

    pub fn params(&self) -> &OtParams {
        &self.params
    }

    pub fn aborted(&self) -> Option<AbortReason> {
        self.abort
    }

    /// The decoded subsets `C_0, C_1`, as positions within `A`.
    pub fn branches(&self) -> Option<&[IndexSet; 2]> {
        self.branches.as_ref()
    }

    pub fn sample(&self) -> Option<(&IndexSet, &BitString)> {
        self.a.as_ref().zip(self.x_a.as_ref())
    }

    pub fn transmit<R: Rng + ?Sized>(&mut self, x: &BitString, rng: &mut R) -> Result<()> {
        if self.phase != SenderPhase::Fresh {
            return Err(Error::State("transmission already done"));
        }
        if x.len() != self.params.n() {
            return Err(Error::LengthMismatch { left: x.len(), right: self.params.n() });
        }
        let a = sample_positions(self.params.n(), self.params.k, rng)?;
        self.x_a = Some(x.restrict(&a)?);
        self.a = Some(a);
        self.phase = SenderPhase::Transmitted;
        Ok(())
    }

    /// Announces `A` and starts interactive hashing.
    pub fn announce(&mut self) -> Result<IndexSet> {
        if self.phase != SenderPhase::Transmitted {
            return Err(Error::State("announce follows transmission"));
        }
        self.querier = Some(IhQuerier::new(self.params.m)?);
        self.phase = SenderPhase::Hashing;
        Ok(self.a.clone().expect("transmitted"))
    }

    fn querier(&mut self) -> Result<&mut IhQuerier> {
        if self.phase != SenderPhase::Hashing {
            return Err(Error::State("not in interactive hashing"));
        }
        Ok(self.querier.as_mut().expect("hashing"))
    }

    pub fn hashing_complete(&self) -> bool {
        self.querier.as_ref().is_some_and(IhQuerier::is_complete)
    }

    /// The next round number and query.
    pub fn next_query<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(usize, BitString)> {
        let q = self.querier()?;
        let round = q.round();
        Ok((round, q.next_query(rng)?))
    }

    pub fn receive_response(&mut self, round: usize, c: bool) -> Result<Option<AbortReason>> {
        let q = self.querier()?;
        if round != q.round() {
            return Ok(Some(self.fail(AbortReason::MalformedMessage)));
        }
        q.receive(c)?;
        if q.is_complete() {
            return self.finish_hashing();
        }
        Ok(None)
    }

    fn fail(&mut self, reason: AbortReason) -> AbortReason {
        self.phase = SenderPhase::Aborted;
        self.abort = Some(reason);
        reason
    }

    /// Records an abort announced by the other party.
    pub fn peer_aborted(&mut self, reason: AbortReason) {
        self.fail(reason);
    }

    fn finish_hashing(&mut self) -> Result<Option<AbortReason>> {
        let (w0, w1) = self.querier.as_ref().expect("hashing").finalize()?;
        match (self.dense.decode(&w0)?, self.dense.decode(&w1)?) {
            (Some((c0, _)), Some((c1, _))) if c0 != c1 => {
                self.branches = Some([c0, c1]);
                self.phase = SenderPhase::Ready;
                Ok(None)
            }
            _ => Ok(Some(self.fail(AbortReason::InvalidEncoding))),
        }
    }

    /// Answers `e` with both masked branches: `Z_i = s_{i⊕e} ⊕ Y_i`.
    pub fn transfer<R: Rng + ?Sized>(&mut self, e: bool, rng: &mut R) -> Result<Payload> {
        if self.phase != SenderPhase::Ready {
            return Err(Error::State("transfer follows a completed setup"));
        }
        let x_a = self.x_a.as_ref().expect("transmitted");
        let branches = self.branches.as_ref().expect("ready");
        let mut parts = Vec::with_capacity(2);
        for (i, c_i) in branches.iter().enumerate() {
            let seed = ExtractorSeed::random(self.params.ell(), self.params.payload_len, rng);
            let out = self.fe.ext(&x_a.restrict(c_i)?, &seed)?;
            let secret = &self.s[i ^ e as usize];
            parts.push((secret.xor(&out.y)?, seed, out.p));
        }
        let (z1, r1, p1) = parts.pop().unwrap();
        let (z0, r0, p0) = parts.pop().unwrap();
        self.phase = SenderPhase::Done;
        Ok(Payload { z: [z0, z1], r: [r0, r1], p: [p0, p1] })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ReceiverPhase {
    Fresh,
    Transmitted,
    Hashing,
    Ready,
    Waiting,
    Done,
    Aborted,
}

/// Receiver's result: `Some(s_c)`, or `None` when decoding failed (⊥).
pub type TransferOutput = Option<BitString>;

#[derive(Clone, Debug)]
pub struct Receiver {
    params: OtParams,
    dense: DenseCode,
    fe: FuzzyExtractor,
    choice: bool,
    phase: ReceiverPhase,
    b: Option<IndexSet>,
    x_b: Option<BitString>,
    a: Option<IndexSet>,
    /// `C` as positions within `A`.
    subset: Option<IndexSet>,
    respondent: Option<IhRespondent>,
    d: Option<bool>,
    abort: Option<AbortReason>,
    output: Option<TransferOutput>,
}

impl Receiver {
    pub fn new(params: OtParams, choice: bool) -> Result<Self> {
        Ok(Receiver {
            dense: dense_code(&params)?,
            fe: fuzzy_extractor(&params)?,
            params,
            choice,
            phase: ReceiverPhase::Fresh,
            b: None,
            x_b: None,
            a: None,
            subset: None,
            respondent: None,
            d: None,
            abort: None,
            output: None,
        })
    }

    pub fn aborted(&self) -> Option<AbortReason> {
        self.abort
    }

    pub fn d(&self) -> Option<bool> {
        self.d
    }

    pub fn subset(&self) -> Option<&IndexSet> {
        self.subset.as_ref()
    }

    pub fn output(&self) -> Option<&TransferOutput> {
        self.output.as_ref()
    }

    pub fn sample(&self) -> Option<(&IndexSet, &BitString)> {
        self.b.as_ref().zip(self.x_b.as_ref())
    }

    pub fn transmit<R: Rng + ?Sized>(&mut self, x_tilde: &BitString, rng: &mut R) -> Result<()> {
        if self.phase != ReceiverPhase::Fresh {
            return Err(Error::State("transmission already done"));
        }
        if x_tilde.len() != self.params.n() {
            return Err(Error::LengthMismatch { left: x_tilde.len(), right: self.params.n() });
        }
        let b = sample_positions(self.params.n(), self.params.k, rng)?;
        self.x_b = Some(x_tilde.restrict(&b)?);
        self.b = Some(b);
        self.phase = ReceiverPhase::Transmitted;
        Ok(())
    }

    fn fail(&mut self, reason: AbortReason) -> AbortReason {
        self.phase = ReceiverPhase::Aborted;
        self.abort = Some(reason);
        reason
    }

    pub fn peer_aborted(&mut self, reason: AbortReason) {
        self.fail(reason);
    }

    /// `D = A ∩ B` for a well-formed `A`, else the abort reason.
    fn intersection(&mut self, a: &IndexSet) -> Result<std::result::Result<IndexSet, AbortReason>> {
        if self.phase != ReceiverPhase::Transmitted {
            return Err(Error::State("A arrives after transmission"));
        }
        if a.ground() != self.params.n() || a.len() != self.params.k {
            return Ok(Err(self.fail(AbortReason::MalformedMessage)));
        }
        let d = a.intersect(self.b.as_ref().expect("transmitted"))?;
        if d.len() < self.params.ell() {
            return Ok(Err(self.fail(AbortReason::SmallIntersection)));
        }
        Ok(Ok(d))
    }

    /// Picks a uniform `ℓ`-subset `C` of `A ∩ B` and a uniform copy index.
    pub fn receive_set<R: Rng + ?Sized>(&mut self, a: IndexSet, rng: &mut R) -> Result<Option<AbortReason>> {
        let d = match self.intersection(&a)? {
            Ok(d) => d,
            Err(reason) => return Ok(Some(reason)),
        };
        let picks = index::sample(rng, d.len(), self.params.ell()).into_vec();
        let c_abs = IndexSet::from_unsorted(self.params.n(), picks.into_iter().map(|i| d.indices()[i]).collect())?;
        let relative = a.relative(&c_abs)?;
        let copy = self.dense.random_copy(rng);
        self.start_hashing(a, relative, &copy)?;
        Ok(None)
    }

    /// As [`receive_set`](Self::receive_set) with `C` (positions within `A`)
    /// and the copy index fixed by the caller. `C` need not lie in `A ∩ B`;
    /// such a receiver cannot decode its branch.
    pub fn receive_set_with(&mut self, a: IndexSet, relative: IndexSet, copy: &BigUint) -> Result<Option<AbortReason>> {
        if let Err(reason) = self.intersection(&a)? {
            return Ok(Some(reason));
        }
        if relative.len() != self.params.ell() {
            return Err(Error::SubsetSize { got: relative.len(), expected: self.params.ell() });
        }
        self.start_hashing(a, relative, copy)?;
        Ok(None)
    }

    fn start_hashing(&mut self, a: IndexSet, relative: IndexSet, copy: &BigUint) -> Result<()> {
        let w = self.dense.encode(&relative, copy)?;
        self.respondent = Some(IhRespondent::new(w)?);
        self.subset = Some(relative);
        self.a = Some(a);
        self.phase = ReceiverPhase::Hashing;
        Ok(())
    }

    /// Answers one query; a dependent or out-of-order query aborts.
    pub fn respond(&mut self, round: usize, b: &BitString) -> Result<std::result::Result<bool, AbortReason>> {
        if self.phase != ReceiverPhase::Hashing {
            return Err(Error::State("not in interactive hashing"));
        }
        let r = self.respondent.as_mut().expect("hashing");
        if round != r.answered() {
            return Ok(Err(self.fail(AbortReason::MalformedMessage)));
        }
        match r.respond(b) {
            Ok(c) => Ok(Ok(c)),
            Err(Error::InteractiveHashing(_)) => Ok(Err(self.fail(AbortReason::MalformedMessage))),
            Err(other) => Err(other),
        }
    }

    pub fn hashing_complete(&self) -> bool {
        self.respondent.as_ref().is_some_and(IhRespondent::is_complete)
    }

    /// Decodes both outputs; on success returns `e = c ⊕ d`.
    pub fn finish_hashing(&mut self) -> Result<std::result::Result<bool, AbortReason>> {
        if self.phase != ReceiverPhase::Hashing || !self.hashing_complete() {
            return Err(Error::State("interactive hashing not complete"));
        }
        let outcome = self.respondent.as_ref().expect("hashing").finalize()?;
        match (self.dense.decode(&outcome.w0)?, self.dense.decode(&outcome.w1)?) {
            (Some((c0, _)), Some((c1, _))) if c0 != c1 => {
                let mine = if outcome.d { c1 } else { c0 };
                debug_assert_eq!(Some(&mine), self.subset.as_ref());
                self.d = Some(outcome.d);
                self.phase = ReceiverPhase::Ready;
                Ok(Ok(self.choice ^ outcome.d))
            }
            _ => Ok(Err(self.fail(AbortReason::InvalidEncoding))),
        }
    }

    /// Marks `e` as sent.
    pub fn sent_choice(&mut self) -> Result<()> {
        if self.phase != ReceiverPhase::Ready {
            return Err(Error::State("choice follows a completed setup"));
        }
        self.phase = ReceiverPhase::Waiting;
        Ok(())
    }

    /// `s = Rec(X̃^C, R_d, P_d) ⊕ Z_d`, or ⊥ if decoding fails.
    pub fn receive_payload(&mut self, payload: &Payload) -> Result<std::result::Result<TransferOutput, AbortReason>> {
        if self.phase != ReceiverPhase::Waiting {
            return Err(Error::State("payload follows the choice bit"));
        }
        let d = self.d.expect("ready") as usize;
        let well_formed = payload.z.iter().all(|z| z.len() == self.params.payload_len)
            && payload.p.iter().all(|p| p.len() == self.fe.helper_len())
            && payload.r.iter().all(|r| r.bits().len() == self.fe.seed_len());
        if !well_formed {
            return Ok(Err(self.fail(AbortReason::MalformedMessage)));
        }
        let a = self.a.as_ref().expect("hashing");
        let b = self.b.as_ref().expect("transmitted");
        let c_abs = index_map(a, self.subset.as_ref().expect("hashing"))?;
        let x_c = self.x_b.as_ref().expect("transmitted").restrict(&b.relative(&c_abs)?)?;
        let output = match self.fe.rec(&x_c, &payload.r[d], &payload.p[d]) {
            Ok(rec) => Some(rec.y.xor(&payload.z[d])?),
            Err(Error::DecodeFailure) => None,
            Err(other) => return Err(other),
        };
        self.output = Some(output.clone());
        self.phase = ReceiverPhase::Done;
        Ok(Ok(output))
    }
}

/// How an in-process run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OtOutcome {
    Aborted(AbortReason),
    Transferred { output: TransferOutput, d: bool, e: bool },
}

/// Runs both parties in-process with independent randomness.
pub fn simulate<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    params: &OtParams,
    pair: &SourcePair,
    secrets: (&BitString, &BitString),
    choice: bool,
    alice_rng: &mut R1,
    bob_rng: &mut R2,
) -> Result<OtOutcome> {
    let mut alice = Sender::new(params.clone(), secrets.0.clone(), secrets.1.clone())?;
    let mut bob = Receiver::new(params.clone(), choice)?;
    alice.transmit(&pair.x, alice_rng)?;
    bob.transmit(&pair.x_tilde, bob_rng)?;
    let a = alice.announce()?;
    if let Some(reason) = bob.receive_set(a, bob_rng)? {
        return Ok(OtOutcome::Aborted(reason));
    }
    while !alice.hashing_complete() {
        let (round, b) = alice.next_query(alice_rng)?;
        let c = match bob.respond(round, &b)? {
            Ok(c) => c,
            Err(reason) => return Ok(OtOutcome::Aborted(reason)),
        };
        if let Some(reason) = alice.receive_response(round, c)? {
            return Ok(OtOutcome::Aborted(reason));
        }
    }
    let e = match bob.finish_hashing()? {
        Ok(e) => e,
        Err(reason) => return Ok(OtOutcome::Aborted(reason)),
    };
    bob.sent_choice()?;
    let payload = alice.transfer(e, alice_rng)?;
    let output = bob.receive_payload(&payload)?.map_err(|_| Error::State("honest payload rejected"))?;
    Ok(OtOutcome::Transferred { output, d: bob.d().expect("ready"), e })
}
