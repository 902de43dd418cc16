//! Fixed messages whose encodings are frozen in `golden/frames.txt`.

use bsm_core::app::Message;
use bsm_core::commit::{CommitMessage, OpenMessage, Reason};
use bsm_core::hashing::{ExtractorSeed, ToeplitzHash};
use bsm_core::ot::{AbortReason, Payload};
use bsm_core::{BitString, IndexSet};

pub const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/frames.txt");

fn b(s: &str) -> BitString {
    s.parse().unwrap()
}

pub fn golden_messages() -> Vec<(&'static str, Message)> {
    vec![
        ("ebit-1", Message::EBit(true)),
        ("ebit-0", Message::EBit(false)),
        ("seta-empty", Message::SetA(IndexSet::empty(0))),
        ("seta", Message::SetA(IndexSet::new(11, vec![0, 3, 4, 10]).unwrap())),
        ("hash", Message::Hash(ToeplitzHash::new(5, 3, b("1011001")).unwrap())),
        (
            "commit",
            Message::Commit(CommitMessage {
                omega: b("10"),
                digest: b("0111"),
                a: IndexSet::new(9, vec![1, 2, 8]).unwrap(),
                u: ExtractorSeed(b("1100")),
            }),
        ),
        ("open", Message::Open(OpenMessage { v: b("10"), w: b("101") })),
        ("verdict-accept", Message::Verdict { accept: true, reason: Reason::Accepted }),
        ("verdict-digest", Message::Verdict { accept: false, reason: Reason::DigestMismatch }),
        ("query", Message::Query { round: 258, b: b("100000001") }),
        ("response", Message::Response { round: 7, c: true }),
        (
            "payload",
            Message::Payload(Payload {
                z: [b("1"), b("0")],
                r: [ExtractorSeed(b("10101010")), ExtractorSeed(b("01010101"))],
                p: [b("110"), b("")],
            }),
        ),
        ("abort", Message::Abort(AbortReason::InvalidEncoding)),
    ]
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// `(name, hex)` pairs from the golden file.
pub fn load_golden() -> Vec<(String, String)> {
    std::fs::read_to_string(GOLDEN)
        .unwrap_or_default()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (name, hex) = l.split_once(' ').expect("name hex");
            (name.to_string(), hex.trim().to_string())
        })
        .collect()
}
