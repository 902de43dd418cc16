//! Wire format, transports, configuration and the two-party session runner.

pub mod config;
pub mod frame;
pub mod session;
pub mod transport;

pub use config::{OutputFormat, Protocol, Role, SessionConfig, TransportKind};
pub use frame::{decode_frame, encode_frame, Message, Tag};
pub use session::{run_party, run_session, PartyReport, SessionOutcome, Transcript};
pub use transport::{memory_pair, MemoryTransport, SocketTransport, Transport};
