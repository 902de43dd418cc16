//! Frame channels between the two parties.
//!
//! The socket transport prefixes each frame with its byte length (4 bytes,
//! big-endian) and carries one session per connection. It adds no
//! confidentiality or authentication.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::time::Duration;

use crate::error::{Error, Result};

/// Largest frame the socket transport accepts.
pub const MAX_FRAME_BYTES: u32 = 1 << 24;

pub trait Transport {
    fn send(&mut self, frame: &[u8]) -> Result<()>;
    fn recv(&mut self) -> Result<Vec<u8>>;

    /// Ends the session; frames the peer still sends are discarded.
    fn close(&mut self) -> Result<()> {
        Ok(())
    }
}

/// One end of an in-process queue pair.
#[derive(Debug)]
pub struct MemoryTransport {
    tx: Sender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
}

pub fn memory_pair() -> (MemoryTransport, MemoryTransport) {
    let (tx_a, rx_b) = channel();
    let (tx_b, rx_a) = channel();
    (MemoryTransport { tx: tx_a, rx: rx_a }, MemoryTransport { tx: tx_b, rx: rx_b })
}

impl Transport for MemoryTransport {
    /// Frames to a peer that already left are dropped, as a socket buffer would.
    fn send(&mut self, frame: &[u8]) -> Result<()> {
        let _ = self.tx.send(frame.to_vec());
        Ok(())
    }

    fn recv(&mut self) -> Result<Vec<u8>> {
        self.rx.recv().map_err(|_| Error::Transport("peer hung up".into()))
    }
}

#[derive(Debug)]
pub struct SocketTransport {
    stream: TcpStream,
}

impl SocketTransport {
    pub fn new(stream: TcpStream) -> Result<Self> {
        stream.set_nodelay(true)?;
        stream.set_read_timeout(Some(Duration::from_secs(60)))?;
        Ok(SocketTransport { stream })
    }

    /// Accepts exactly one connection.
    pub fn accept(listener: &TcpListener) -> Result<Self> {
        let (stream, _) = listener.accept()?;
        SocketTransport::new(stream)
    }

    pub fn connect<A: ToSocketAddrs>(addr: A) -> Result<Self> {
        SocketTransport::new(TcpStream::connect(addr)?)
    }

    /// Connects, retrying for a few seconds while the listener comes up.
    pub fn connect_retry(addr: &str) -> Result<Self> {
        let mut last = None;
        for _ in 0..50 {
            match TcpStream::connect(addr) {
                Ok(s) => return SocketTransport::new(s),
                Err(e) => last = Some(e),
            }
            std::thread::sleep(Duration::from_millis(100));
        }
        Err(last.map(Error::from).unwrap_or_else(|| Error::Transport("connect failed".into())))
    }
}

impl Transport for SocketTransport {
    fn send(&mut self, frame: &[u8]) -> Result<()> {
        let len = u32::try_from(frame.len())
            .ok()
            .filter(|&l| l <= MAX_FRAME_BYTES)
            .ok_or_else(|| Error::Frame(format!("frame of {} bytes too large", frame.len())))?;
        self.stream.write_all(&len.to_be_bytes())?;
        self.stream.write_all(frame)?;
        Ok(())
    }

    fn recv(&mut self) -> Result<Vec<u8>> {
        let mut len = [0u8; 4];
        self.stream.read_exact(&mut len)?;
        let len = u32::from_be_bytes(len);
        if len > MAX_FRAME_BYTES {
            return Err(Error::Frame(format!("announced frame of {len} bytes too large")));
        }
        let mut buf = vec![0u8; len as usize];
        self.stream.read_exact(&mut buf)?;
        Ok(buf)
    }

    /// Half-closes and drains until the peer closes too, so neither side
    /// resets a connection holding unread frames.
    fn close(&mut self) -> Result<()> {
        self.stream.shutdown(std::net::Shutdown::Write)?;
        let mut sink = [0u8; 4096];
        while matches!(self.stream.read(&mut sink), Ok(n) if n > 0) {}
        Ok(())
    }
}
