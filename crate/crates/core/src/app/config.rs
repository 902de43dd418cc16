//! Session configuration and its flat `key=value` file format.

use std::fmt;
use std::str::FromStr;

use crate::codes::CodeSpec;
use crate::error::{Error, Result};
use crate::infomath::{CommitInputs, CommitParams, OtInputs, OtParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Commit,
    Ot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportKind {
    Memory,
    Socket,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Human,
    JsonLines,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    _ => Err(Error::Config(format!(
                        concat!("unknown ", stringify!($ty), " {:?}; expected one of: ", $($text, " ",)+),
                        s
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $text,)+ })
            }
        }
    };
}

keyword_enum!(Protocol { Commit => "commit", Ot => "ot" });
keyword_enum!(TransportKind { Memory => "memory", Socket => "socket" });
keyword_enum!(Role { Alice => "alice", Bob => "bob" });
keyword_enum!(OutputFormat { Human => "human", JsonLines => "json-lines" });

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    pub protocol: Protocol,
    pub n: usize,
    pub ell: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Verifier's extra error tolerance (commitment only).
    pub zeta: f64,
    /// Fuzzy-extractor code (oblivious transfer only).
    pub code: CodeSpec,
    /// Receiver's choice bit; drawn from the receiver's randomness when unset.
    pub choice: Option<bool>,
    pub seed: u64,
    pub transport: TransportKind,
    /// Party to play in two-process mode.
    pub role: Option<Role>,
    pub address: Option<String>,
    pub output: OutputFormat,
}

const KEYS: [&str; 14] = [
    "protocol", "n", "ell", "alpha", "gamma", "delta", "zeta", "code", "choice", "seed", "transport", "role", "address",
    "output",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        _ => Err(Error::Config(format!("bad value {value:?} for {key}"))),
    }
}

impl SessionConfig {
    /// Desk-scale defaults for each protocol.
    pub fn defaults(protocol: Protocol) -> Self {
        let (ell, gamma, delta) = match protocol {
            Protocol::Commit => (16, 0.25, 0.02),
            Protocol::Ot => (14, 0.05, 0.01),
        };
        SessionConfig {
            protocol,
            n: 4096,
            ell,
            alpha: 1.0,
            gamma,
            delta,
            zeta: 0.05,
            code: CodeSpec::Hamming74,
            choice: None,
            seed: 1,
            transport: TransportKind::Memory,
            role: None,
            address: None,
            output: OutputFormat::Human,
        }
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "protocol" => self.protocol = value.parse()?,
            "n" => self.n = parse(key, value)?,
            "ell" => self.ell = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "zeta" => self.zeta = parse(key, value)?,
            "code" => self.code = value.parse()?,
            "choice" => self.choice = Some(parse_bool(key, value)?),
            "seed" => self.seed = parse(key, value)?,
            "transport" => self.transport = value.parse()?,
            "role" => self.role = Some(value.parse()?),
            "address" => self.address = Some(value.to_string()),
            "output" => self.output = value.parse()?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines onto `self`. Blank lines and `#` comments are
    /// skipped; a `protocol` line is applied first.
    pub fn load(&mut self, text: &str) -> Result<()> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        pairs.sort_by_key(|(k, _)| k != "protocol");
        for (key, value) in pairs {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    /// Defaults for the file's protocol overlaid with the file.
    pub fn from_text(text: &str) -> Result<Self> {
        let protocol = text
            .lines()
            .filter_map(|l| l.split('#').next()?.split_once('='))
            .find(|(k, _)| k.trim() == "protocol")
            .map(|(_, v)| v.trim().parse())
            .transpose()?
            .unwrap_or(Protocol::Commit);
        let mut cfg = SessionConfig::defaults(protocol);
        cfg.load(text)?;
        Ok(cfg)
    }

    /// One `key=value` line per set key; `from_text(dump())` is the identity.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "protocol" => self.protocol.to_string(),
                "n" => self.n.to_string(),
                "ell" => self.ell.to_string(),
                "alpha" => self.alpha.to_string(),
                "gamma" => self.gamma.to_string(),
                "delta" => self.delta.to_string(),
                "zeta" => self.zeta.to_string(),
                "code" => self.code.to_string(),
                "choice" => match self.choice {
                    Some(c) => (c as u8).to_string(),
                    None => continue,
                },
                "seed" => self.seed.to_string(),
                "transport" => self.transport.to_string(),
                "role" => match self.role {
                    Some(r) => r.to_string(),
                    None => continue,
                },
                "address" => match &self.address {
                    Some(a) => a.clone(),
                    None => continue,
                },
                "output" => self.output.to_string(),
                _ => unreachable!(),
            };
            out.push_str(&format!("{key}={value}\n"));
        }
        out
    }

    pub fn commit_params(&self) -> Result<CommitParams> {
        CommitInputs::auto(self.n, self.ell, self.alpha, self.gamma, self.delta, self.zeta)?.derive()
    }

    pub fn ot_params(&self) -> Result<OtParams> {
        OtInputs::with_defaults(self.n, self.ell, self.alpha, self.gamma, self.delta).derive(&self.code.build()?)
    }

    /// Derives the protocol parameters, which must succeed before any message is sent.
    pub fn validate(&self) -> Result<()> {
        match self.protocol {
            Protocol::Commit => self.commit_params().map(|_| ()),
            Protocol::Ot => self.ot_params().map(|_| ()),
        }
    }
}
