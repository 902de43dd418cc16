//! Commitment and oblivious transfer in the bounded storage model, where the
//! two honest parties read noisy copies of a public random source.

pub mod app;
pub mod bits;
pub mod codes;
pub mod commit;
pub mod error;
pub mod harness;
pub mod hashing;
pub mod ihash;
pub mod infomath;
pub mod ot;
pub mod source;
pub mod subsets;

pub use bits::{BitString, IndexSet};
pub use error::{Error, Result};
