//! Deterministic two-party session runner.
//!
//! The source pair comes from the session seed; Alice draws from stream 1
//! of a ChaCha20 generator keyed by the seed and Bob from stream 2, so a
//! configuration fixes every byte each party sends.

use std::fmt::Write as _;
use std::net::TcpListener;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{Protocol, Role, SessionConfig, TransportKind};
use super::frame::{decode_frame, encode_frame, Message};
use super::transport::{memory_pair, SocketTransport, Transport};
use crate::bits::BitString;
use crate::commit::{Committer, Reason, Verdict, Verifier};
use crate::error::{Error, Result};
use crate::ot::{AbortReason, Receiver, Sender, TransferOutput};
use crate::source::{generate, SourceConfig, SourcePair};

/// Frames one party sent and received, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub frames: Vec<(bool, Vec<u8>)>,
}

impl Transcript {
    /// Each frame as a direction byte (1 = sent), a 4-byte big-endian
    /// length and the frame.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (sent, f) in &self.frames {
            out.push(*sent as u8);
            out.extend((f.len() as u32).to_be_bytes());
            out.extend(f);
        }
        out
    }

    pub fn digest(&self) -> String {
        Sha256::digest(self.to_bytes()).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn byte_count(&self) -> usize {
        self.frames.iter().map(|(_, f)| f.len()).sum()
    }
}

struct Channel<'a> {
    transport: &'a mut dyn Transport,
    log: Transcript,
}

impl Channel<'_> {
    fn send(&mut self, msg: &Message) -> Result<()> {
        let bytes = encode_frame(msg);
        self.transport.send(&bytes)?;
        self.log.frames.push((true, bytes));
        Ok(())
    }

    fn recv(&mut self) -> Result<Message> {
        let bytes = self.transport.recv()?;
        let msg = decode_frame(&bytes);
        self.log.frames.push((false, bytes));
        msg
    }
}

fn unexpected(msg: &Message) -> Error {
    Error::Frame(format!("unexpected {:?} frame", msg.tag()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartyOutcome {
    Committer { v: BitString, accept: bool, reason: Reason },
    Verifier(Verdict),
    Sender { secrets: [BitString; 2], abort: Option<AbortReason> },
    Receiver { choice: bool, d: Option<bool>, output: Option<TransferOutput>, abort: Option<AbortReason> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyReport {
    pub role: Role,
    pub transcript: Transcript,
    pub outcome: PartyOutcome,
}

fn party_rng(seed: u64, role: Role) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(match role {
        Role::Alice => 1,
        Role::Bob => 2,
    });
    rng
}

fn source(cfg: &SessionConfig) -> Result<SourcePair> {
    generate(&SourceConfig::new(cfg.n, cfg.alpha, cfg.delta, cfg.seed))
}

fn commit_alice(cfg: &SessionConfig, x: &BitString, ch: &mut Channel) -> Result<PartyOutcome> {
    let params = cfg.commit_params()?;
    let mut rng = party_rng(cfg.seed, Role::Alice);
    let v = BitString::random(params.m, &mut rng);
    let mut alice = Committer::new(params, v.clone())?;
    alice.transmit(x, &mut rng)?;
    let g = match ch.recv()? {
        Message::Hash(g) => g,
        other => return Err(unexpected(&other)),
    };
    ch.send(&Message::Commit(alice.commit(&g, &mut rng)?))?;
    ch.send(&Message::Open(alice.open()?))?;
    match ch.recv()? {
        Message::Verdict { accept, reason } => Ok(PartyOutcome::Committer { v, accept, reason }),
        other => Err(unexpected(&other)),
    }
}

fn commit_bob(cfg: &SessionConfig, x_tilde: &BitString, ch: &mut Channel) -> Result<PartyOutcome> {
    let params = cfg.commit_params()?;
    let mut rng = party_rng(cfg.seed, Role::Bob);
    let mut bob = Verifier::new(params);
    bob.transmit(x_tilde, &mut rng)?;
    ch.send(&Message::Hash(bob.choose_hash(&mut rng)?))?;
    let verdict = match ch.recv()? {
        Message::Commit(c) => match bob.receive_commitment(c) {
            Ok(()) => match ch.recv()? {
                Message::Open(open) => bob.verify_open(&open)?,
                other => return Err(unexpected(&other)),
            },
            Err(Error::State(_)) => return Err(Error::State("verifier out of order")),
            Err(_) => Verdict { accept: false, reason: Reason::Malformed, intersection: 0, mismatches: 0 },
        },
        other => return Err(unexpected(&other)),
    };
    ch.send(&Message::Verdict { accept: verdict.accept, reason: verdict.reason })?;
    Ok(PartyOutcome::Verifier(verdict))
}

fn ot_alice(cfg: &SessionConfig, x: &BitString, ch: &mut Channel) -> Result<PartyOutcome> {
    let params = cfg.ot_params()?;
    let mut rng = party_rng(cfg.seed, Role::Alice);
    let secrets = [BitString::random(params.payload_len, &mut rng), BitString::random(params.payload_len, &mut rng)];
    let done = |abort| Ok(PartyOutcome::Sender { secrets: secrets.clone(), abort });
    let mut alice = Sender::new(params, secrets[0].clone(), secrets[1].clone())?;
    alice.transmit(x, &mut rng)?;
    ch.send(&Message::SetA(alice.announce()?))?;
    while !alice.hashing_complete() {
        let (round, b) = alice.next_query(&mut rng)?;
        ch.send(&Message::Query { round: round as u32, b })?;
        match ch.recv()? {
            Message::Response { round, c } => {
                if let Some(reason) = alice.receive_response(round as usize, c)? {
                    ch.send(&Message::Abort(reason))?;
                    return done(Some(reason));
                }
            }
            Message::Abort(reason) => {
                alice.peer_aborted(reason);
                return done(Some(reason));
            }
            other => return Err(unexpected(&other)),
        }
    }
    match ch.recv()? {
        Message::EBit(e) => {
            ch.send(&Message::Payload(alice.transfer(e, &mut rng)?))?;
            done(None)
        }
        Message::Abort(reason) => {
            alice.peer_aborted(reason);
            done(Some(reason))
        }
        other => Err(unexpected(&other)),
    }
}

fn ot_bob(cfg: &SessionConfig, x_tilde: &BitString, ch: &mut Channel) -> Result<PartyOutcome> {
    let params = cfg.ot_params()?;
    let mut rng = party_rng(cfg.seed, Role::Bob);
    let choice = cfg.choice.unwrap_or_else(|| rng.gen());
    let mut bob = Receiver::new(params, choice)?;
    let aborted = |bob: &Receiver, reason| Ok(PartyOutcome::Receiver { choice, d: bob.d(), output: None, abort: Some(reason) });
    bob.transmit(x_tilde, &mut rng)?;
    let a = match ch.recv()? {
        Message::SetA(a) => a,
        other => return Err(unexpected(&other)),
    };
    if let Some(reason) = bob.receive_set(a, &mut rng)? {
        ch.send(&Message::Abort(reason))?;
        return aborted(&bob, reason);
    }
    while !bob.hashing_complete() {
        match ch.recv()? {
            Message::Query { round, b } => match bob.respond(round as usize, &b)? {
                Ok(c) => ch.send(&Message::Response { round, c })?,
                Err(reason) => {
                    ch.send(&Message::Abort(reason))?;
                    return aborted(&bob, reason);
                }
            },
            Message::Abort(reason) => {
                bob.peer_aborted(reason);
                return aborted(&bob, reason);
            }
            other => return Err(unexpected(&other)),
        }
    }
    match bob.finish_hashing()? {
        Ok(e) => {
            bob.sent_choice()?;
            ch.send(&Message::EBit(e))?;
        }
        Err(reason) => {
            ch.send(&Message::Abort(reason))?;
            return aborted(&bob, reason);
        }
    }
    let payload = match ch.recv()? {
        Message::Payload(p) => p,
        other => return Err(unexpected(&other)),
    };
    match bob.receive_payload(&payload)? {
        Ok(output) => Ok(PartyOutcome::Receiver { choice, d: bob.d(), output: Some(output), abort: None }),
        Err(reason) => {
            ch.send(&Message::Abort(reason))?;
            aborted(&bob, reason)
        }
    }
}

/// Plays one side of the session over `transport`.
pub fn run_party(cfg: &SessionConfig, role: Role, transport: &mut dyn Transport) -> Result<PartyReport> {
    cfg.validate()?;
    let pair = source(cfg)?;
    let mut ch = Channel { transport, log: Transcript::default() };
    let outcome = match (cfg.protocol, role) {
        (Protocol::Commit, Role::Alice) => commit_alice(cfg, &pair.x, &mut ch),
        (Protocol::Commit, Role::Bob) => commit_bob(cfg, &pair.x_tilde, &mut ch),
        (Protocol::Ot, Role::Alice) => ot_alice(cfg, &pair.x, &mut ch),
        (Protocol::Ot, Role::Bob) => ot_bob(cfg, &pair.x_tilde, &mut ch),
    };
    let closed = ch.transport.close();
    let outcome = outcome?;
    closed?;
    Ok(PartyReport { role, transcript: ch.log, outcome })
}

/// Both parties' reports for one session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionOutcome {
    pub protocol: Protocol,
    pub seed: u64,
    pub errors: usize,
    pub alice: PartyReport,
    pub bob: PartyReport,
}

impl SessionOutcome {
    /// Commitment accepted, or the receiver got the chosen string.
    pub fn success(&self) -> bool {
        match (&self.alice.outcome, &self.bob.outcome) {
            (_, PartyOutcome::Verifier(v)) => v.accept,
            (PartyOutcome::Sender { secrets, .. }, PartyOutcome::Receiver { choice, output: Some(Some(s)), .. }) => {
                *s == secrets[*choice as usize]
            }
            _ => false,
        }
    }

    pub fn abort(&self) -> Option<AbortReason> {
        match &self.bob.outcome {
            PartyOutcome::Receiver { abort, .. } => *abort,
            _ => None,
        }
    }

    /// One JSON record per phase.
    pub fn records(&self) -> Vec<Value> {
        let mut out = vec![json!({
            "phase": "source",
            "protocol": self.protocol.to_string(),
            "seed": self.seed,
            "errors": self.errors,
        })];
        for report in [&self.alice, &self.bob] {
            let t = &report.transcript;
            out.push(json!({
                "phase": "transcript",
                "party": report.role.to_string(),
                "frames": t.frames.len(),
                "bytes": t.byte_count(),
                "sha256": t.digest(),
            }));
        }
        let result = match &self.bob.outcome {
            PartyOutcome::Verifier(v) => json!({
                "phase": "result",
                "accept": v.accept as u8,
                "reason": v.reason.as_str(),
                "intersection": v.intersection,
                "mismatches": v.mismatches,
            }),
            PartyOutcome::Receiver { choice, d, output, abort } => json!({
                "phase": "result",
                "choice": *choice as u8,
                "d": d.map(|d| d as u8),
                "abort": abort.map(AbortReason::as_str),
                "decoded": output.as_ref().map(Option::is_some),
                "correct": self.success(),
            }),
            _ => json!({ "phase": "result" }),
        };
        out.push(result);
        out
    }

    /// `key=value` rendering of [`SessionOutcome::records`].
    pub fn human_lines(&self) -> Vec<String> {
        self.records()
            .iter()
            .map(|r| {
                let map = r.as_object().expect("records are objects");
                map.iter()
                    .map(|(k, v)| match v {
                        Value::String(s) => format!("{k}={s}"),
                        Value::Bool(b) => format!("{k}={}", *b as u8),
                        other => format!("{k}={other}"),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }
}

/// Runs both parties in this process over the configured transport.
pub fn run_session(cfg: &SessionConfig) -> Result<SessionOutcome> {
    cfg.validate()?;
    let errors = source(cfg)?.error_count;
    let (alice, bob) = match cfg.transport {
        TransportKind::Memory => {
            let (mut ta, mut tb) = memory_pair();
            std::thread::scope(|s| {
                let a = s.spawn(move || run_party(cfg, Role::Alice, &mut ta));
                let b = s.spawn(move || run_party(cfg, Role::Bob, &mut tb));
                (a.join().expect("alice thread"), b.join().expect("bob thread"))
            })
        }
        TransportKind::Socket => {
            let listener = TcpListener::bind(cfg.address.as_deref().unwrap_or("127.0.0.1:0"))?;
            let addr = listener.local_addr()?;
            std::thread::scope(|s| {
                let a = s.spawn(move || {
                    let mut t = SocketTransport::accept(&listener)?;
                    run_party(cfg, Role::Alice, &mut t)
                });
                let b = s.spawn(move || {
                    let mut t = SocketTransport::connect(addr)?;
                    run_party(cfg, Role::Bob, &mut t)
                });
                (a.join().expect("alice thread"), b.join().expect("bob thread"))
            })
        }
    };
    Ok(SessionOutcome { protocol: cfg.protocol, seed: cfg.seed, errors, alice: alice?, bob: bob? })
}
