use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("ground size mismatch: {left} vs {right}")]
    GroundMismatch { left: usize, right: usize },

    #[error("indices must be strictly increasing and below the ground size")]
    MalformedIndexSet,

    #[error("value {value} outside of domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(&'static str),

    /// A parameter set violated one of the feasibility inequalities. The
    /// payload names the first inequality that does not hold.
    #[error("infeasible parameters: `{0}` does not hold")]
    Infeasible(String),

    #[error("cannot sample {k} positions out of {n}")]
    SampleTooLarge { n: usize, k: usize },

    #[error("rank out of range")]
    RankOutOfRange,

    #[error("subset has size {got}, expected {expected}")]
    SubsetSize { got: usize, expected: usize },

    #[error("copy index out of range")]
    CopyOutOfRange,

    #[error("invalid linear code: {0}")]
    InvalidCode(String),

    #[error("syndrome decoding failed")]
    DecodeFailure,

    #[error("interactive hashing: {0}")]
    InteractiveHashing(&'static str),

    #[error("protocol state: {0}")]
    State(&'static str),

    #[error("malformed frame: {0}")]
    Frame(String),

    #[error("transport: {0}")]
    Transport(String),

    #[error("regime too large for exhaustive evaluation: {0}")]
    RegimeTooLarge(String),

    #[error("config: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Transport(err.to_string())
    }
}
