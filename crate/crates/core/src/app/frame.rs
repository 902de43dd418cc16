//! Bit-exact message framing.
//!
//! A frame is a one-byte tag, a 4-byte big-endian field count, and the
//! fields. Each field is a 4-byte big-endian bit length followed by the
//! packed bits (bit 0 is the least significant bit of the first byte),
//! padded with zeros to a byte boundary.
//!
//! | tag  | message    | fields                                  |
//! |------|------------|-----------------------------------------|
//! | 0x01 | `Hash`     | input length (32), diagonal             |
//! | 0x02 | `Commit`   | Ω, digest, A, u                         |
//! | 0x03 | `Open`     | v, W                                    |
//! | 0x04 | `Verdict`  | accept (1), reason (8)                  |
//! | 0x05 | `EBit`     | e (1)                                   |
//! | 0x06 | `SetA`     | A                                       |
//! | 0x07 | `Query`    | round (32), b                           |
//! | 0x08 | `Response` | round (32), c (1)                       |
//! | 0x09 | `Payload`  | Z₀, Z₁, R₀, R₁, P₀, P₁                  |
//! | 0x0a | `Abort`    | reason (8)                              |
//!
//! Index sets travel as their characteristic vector over the ground set.
//! Integers are fixed-width fields in the same bit order.

use crate::bits::{BitString, IndexSet};
use crate::commit::{CommitMessage, OpenMessage, Reason};
use crate::error::{Error, Result};
use crate::hashing::{ExtractorSeed, ToeplitzHash};
use crate::ot::{AbortReason, Payload};

/// Upper bound on the fields of one frame.
pub const MAX_FIELDS: u32 = 16;
/// Upper bound on the bits of one field.
pub const MAX_FIELD_BITS: u32 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Tag {
    Hash = 0x01,
    Commit = 0x02,
    Open = 0x03,
    Verdict = 0x04,
    EBit = 0x05,
    SetA = 0x06,
    Query = 0x07,
    Response = 0x08,
    Payload = 0x09,
    Abort = 0x0a,
}

impl Tag {
    pub fn from_byte(b: u8) -> Option<Tag> {
        use Tag::*;
        [Hash, Commit, Open, Verdict, EBit, SetA, Query, Response, Payload, Abort]
            .into_iter()
            .find(|t| *t as u8 == b)
    }

    fn arity(self) -> usize {
        match self {
            Tag::Hash | Tag::Open | Tag::Verdict | Tag::Query | Tag::Response => 2,
            Tag::Commit => 4,
            Tag::EBit | Tag::SetA | Tag::Abort => 1,
            Tag::Payload => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Hash(ToeplitzHash),
    Commit(CommitMessage),
    Open(OpenMessage),
    Verdict { accept: bool, reason: Reason },
    EBit(bool),
    SetA(IndexSet),
    Query { round: u32, b: BitString },
    Response { round: u32, c: bool },
    Payload(Payload),
    /// Abort code; 0 is reserved.
    Abort(AbortReason),
}

impl Message {
    pub fn tag(&self) -> Tag {
        match self {
            Message::Hash(_) => Tag::Hash,
            Message::Commit(_) => Tag::Commit,
            Message::Open(_) => Tag::Open,
            Message::Verdict { .. } => Tag::Verdict,
            Message::EBit(_) => Tag::EBit,
            Message::SetA(_) => Tag::SetA,
            Message::Query { .. } => Tag::Query,
            Message::Response { .. } => Tag::Response,
            Message::Payload(_) => Tag::Payload,
            Message::Abort(_) => Tag::Abort,
        }
    }
}

fn uint(value: u64, width: usize) -> BitString {
    BitString::from_u64(value, width)
}

fn bit(value: bool) -> BitString {
    BitString::from_bools(&[value])
}

fn set(s: &IndexSet) -> BitString {
    let mut v = BitString::zeros(s.ground());
    for &i in s.indices() {
        v.set(i, true).expect("index below ground");
    }
    v
}

fn fields(msg: &Message) -> Vec<BitString> {
    match msg {
        Message::Hash(g) => vec![uint(g.in_len() as u64, 32), g.diag().clone()],
        Message::Commit(c) => vec![c.omega.clone(), c.digest.clone(), set(&c.a), c.u.bits().clone()],
        Message::Open(o) => vec![o.v.clone(), o.w.clone()],
        Message::Verdict { accept, reason } => vec![bit(*accept), uint(reason.code() as u64, 8)],
        Message::EBit(e) => vec![bit(*e)],
        Message::SetA(a) => vec![set(a)],
        Message::Query { round, b } => vec![uint(*round as u64, 32), b.clone()],
        Message::Response { round, c } => vec![uint(*round as u64, 32), bit(*c)],
        Message::Payload(p) => vec![
            p.z[0].clone(),
            p.z[1].clone(),
            p.r[0].bits().clone(),
            p.r[1].bits().clone(),
            p.p[0].clone(),
            p.p[1].clone(),
        ],
        Message::Abort(r) => vec![uint(r.code() as u64, 8)],
    }
}

pub fn encode_frame(msg: &Message) -> Vec<u8> {
    let fields = fields(msg);
    let mut out = vec![msg.tag() as u8];
    out.extend((fields.len() as u32).to_be_bytes());
    for f in &fields {
        out.extend((f.len() as u32).to_be_bytes());
        out.extend(f.to_bytes());
    }
    out
}

fn frame_err(msg: impl Into<String>) -> Error {
    Error::Frame(msg.into())
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() < n {
            return Err(frame_err("truncated frame"));
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("four bytes")))
    }
}

fn to_uint(f: &BitString, width: usize) -> Result<u64> {
    if f.len() != width {
        return Err(frame_err(format!("expected a {width}-bit field, got {} bits", f.len())));
    }
    Ok(f.to_u64().expect("narrow field"))
}

fn to_bit(f: &BitString) -> Result<bool> {
    Ok(to_uint(f, 1)? == 1)
}

fn to_set(f: &BitString) -> IndexSet {
    IndexSet::new(f.len(), f.ones_positions().collect()).expect("sorted positions")
}

fn to_round(f: &BitString) -> Result<u32> {
    Ok(to_uint(f, 32)? as u32)
}

pub fn decode_frame(bytes: &[u8]) -> Result<Message> {
    let mut r = Reader { bytes };
    let tag_byte = r.take(1)?[0];
    let tag = Tag::from_byte(tag_byte).ok_or_else(|| frame_err(format!("unknown tag 0x{tag_byte:02x}")))?;
    let count = r.u32()?;
    if count > MAX_FIELDS {
        return Err(frame_err(format!("field count {count} overflows")));
    }
    if count as usize != tag.arity() {
        return Err(frame_err(format!("{tag:?} carries {} fields, got {count}", tag.arity())));
    }
    let mut f = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let len = r.u32()?;
        if len > MAX_FIELD_BITS {
            return Err(frame_err(format!("field length {len} overflows")));
        }
        let len = len as usize;
        let packed = r.take(len.div_ceil(8))?;
        if !len.is_multiple_of(8) && packed[packed.len() - 1] >> (len % 8) != 0 {
            return Err(frame_err("nonzero padding"));
        }
        f.push(BitString::from_bytes(len, packed)?);
    }
    if !r.bytes.is_empty() {
        return Err(frame_err(format!("{} trailing bytes", r.bytes.len())));
    }
    let msg = match tag {
        Tag::Hash => {
            let in_len = to_uint(&f[0], 32)? as usize;
            if in_len == 0 || f[1].len() < in_len {
                return Err(frame_err("hash diagonal shorter than its input"));
            }
            Message::Hash(ToeplitzHash::new(in_len, f[1].len() + 1 - in_len, f[1].clone())?)
        }
        Tag::Commit => Message::Commit(CommitMessage {
            omega: f[0].clone(),
            digest: f[1].clone(),
            a: to_set(&f[2]),
            u: ExtractorSeed(f[3].clone()),
        }),
        Tag::Open => Message::Open(OpenMessage { v: f[0].clone(), w: f[1].clone() }),
        Tag::Verdict => {
            let code = to_uint(&f[1], 8)? as u8;
            let reason = Reason::from_code(code).ok_or_else(|| frame_err(format!("unknown verdict {code}")))?;
            Message::Verdict { accept: to_bit(&f[0])?, reason }
        }
        Tag::EBit => Message::EBit(to_bit(&f[0])?),
        Tag::SetA => Message::SetA(to_set(&f[0])),
        Tag::Query => Message::Query { round: to_round(&f[0])?, b: f[1].clone() },
        Tag::Response => Message::Response { round: to_round(&f[0])?, c: to_bit(&f[1])? },
        Tag::Payload => {
            let mut it = f.into_iter();
            let mut next = || it.next().expect("arity checked");
            let z = [next(), next()];
            let r = [ExtractorSeed(next()), ExtractorSeed(next())];
            let p = [next(), next()];
            Message::Payload(Payload { z, r, p })
        }
        Tag::Abort => {
            let code = to_uint(&f[0], 8)? as u8;
            Message::Abort(AbortReason::from_code(code).ok_or_else(|| frame_err(format!("unknown abort {code}")))?)
        }
    };
    Ok(msg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert_eq, proptest, ProptestConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn ebit_golden() {
        assert_eq!(encode_frame(&Message::EBit(true)), [0x05, 0, 0, 0, 1, 0, 0, 0, 1, 0x01]);
        assert_eq!(decode_frame(&[0x05, 0, 0, 0, 1, 0, 0, 0, 1, 0x00]).unwrap(), Message::EBit(false));
    }

    #[test]
    fn empty_set_is_one_empty_field() {
        let bytes = encode_frame(&Message::SetA(IndexSet::empty(0)));
        assert_eq!(bytes, [0x06, 0, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(decode_frame(&bytes).unwrap(), Message::SetA(IndexSet::empty(0)));
    }

    #[test]
    fn malformed_frames_rejected() {
        let good = encode_frame(&Message::Response { round: 3, c: true });
        for cut in 0..good.len() {
            assert!(decode_frame(&good[..cut]).is_err(), "prefix {cut}");
        }
        let mut extra = good.clone();
        extra.push(0);
        assert!(decode_frame(&extra).is_err());
        let mut unknown = good.clone();
        unknown[0] = 0x7f;
        assert!(matches!(decode_frame(&unknown), Err(Error::Frame(m)) if m.contains("unknown tag")));
        let mut overflow = good.clone();
        overflow[1..5].copy_from_slice(&u32::MAX.to_be_bytes());
        assert!(decode_frame(&overflow).is_err());
        let huge = [0x05, 0, 0, 0, 1, 0xff, 0xff, 0xff, 0xff];
        assert!(matches!(decode_frame(&huge), Err(Error::Frame(m)) if m.contains("overflows")));
        // padding bits must be zero
        assert!(decode_frame(&[0x05, 0, 0, 0, 1, 0, 0, 0, 1, 0x03]).is_err());
        // wrong width for a one-bit field
        assert!(decode_frame(&[0x05, 0, 0, 0, 1, 0, 0, 0, 2, 0x01]).is_err());
    }

    fn random_set(rng: &mut ChaCha20Rng) -> IndexSet {
        let ground = rng.gen_range(0..200);
        IndexSet::from_unsorted(ground, (0..ground).filter(|_| rng.gen()).collect()).unwrap()
    }

    fn random_bits(rng: &mut ChaCha20Rng) -> BitString {
        let len = rng.gen_range(0..300);
        BitString::random(len, rng)
    }

    fn random_message(rng: &mut ChaCha20Rng) -> Message {
        match rng.gen_range(0..10) {
            0 => {
                let (i, o) = (rng.gen_range(1..100), rng.gen_range(1..100));
                Message::Hash(ToeplitzHash::random(i, o, rng).unwrap())
            }
            1 => Message::Commit(CommitMessage {
                omega: random_bits(rng),
                digest: random_bits(rng),
                a: random_set(rng),
                u: ExtractorSeed(random_bits(rng)),
            }),
            2 => Message::Open(OpenMessage { v: random_bits(rng), w: random_bits(rng) }),
            3 => Message::Verdict { accept: rng.gen(), reason: Reason::from_code(rng.gen_range(0..6)).unwrap() },
            4 => Message::EBit(rng.gen()),
            5 => Message::SetA(random_set(rng)),
            6 => Message::Query { round: rng.gen(), b: random_bits(rng) },
            7 => Message::Response { round: rng.gen(), c: rng.gen() },
            8 => Message::Payload(Payload {
                z: [random_bits(rng), random_bits(rng)],
                r: [ExtractorSeed(random_bits(rng)), ExtractorSeed(random_bits(rng))],
                p: [random_bits(rng), random_bits(rng)],
            }),
            _ => Message::Abort(AbortReason::from_code(rng.gen_range(1..4)).unwrap()),
        }
    }

    #[test]
    fn randomized_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let m = random_message(&mut rng);
            assert_eq!(decode_frame(&encode_frame(&m)).unwrap(), m);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]
        #[test]
        fn query_round_trip(round in any::<u32>(), raw in any::<Vec<bool>>()) {
            let m = Message::Query { round, b: BitString::from_bools(&raw) };
            prop_assert_eq!(decode_frame(&encode_frame(&m)).unwrap(), m);
        }
    }
}
