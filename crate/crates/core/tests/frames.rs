//! Frame encodings must match the frozen golden file byte for byte.
//! Regenerate with `BSM_BLESS=1 cargo test --test frames` after a deliberate
//! format change.

mod common;

use bsm_core::app::{decode_frame, encode_frame};
use common::{golden_messages, hex, load_golden, GOLDEN};

#[test]
fn golden_frames() {
    let current: Vec<(String, String)> =
        golden_messages().iter().map(|(name, m)| (name.to_string(), hex(&encode_frame(m)))).collect();
    if std::env::var_os("BSM_BLESS").is_some() {
        let mut text = String::from("# tag, field count, then (bit length, packed bits) per field\n");
        for (name, h) in &current {
            text.push_str(&format!("{name} {h}\n"));
        }
        std::fs::write(GOLDEN, text).unwrap();
    }
    assert_eq!(load_golden(), current);
}

#[test]
fn golden_frames_decode() {
    for (name, m) in golden_messages() {
        assert_eq!(decode_frame(&encode_frame(&m)).unwrap(), m, "{name}");
    }
}

#[test]
fn ebit_vector_is_fixed() {
    let golden = load_golden();
    let ebit = golden.iter().find(|(n, _)| n == "ebit-1").unwrap();
    assert_eq!(ebit.1, "05000000010000000101");
}
