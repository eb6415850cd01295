use thiserror::Error;

/// Crate-wide error type. Algorithm code returns `Domain` for contract
/// violations that depend on runtime values; the harness adds I/O, parse and
/// config errors on top.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument left the mathematical domain of an operation.
    #[error("domain error in {op}: {message}")]
    Domain { op: &'static str, message: String },

    /// Vectors of different dimensions were combined.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A betting fraction outside [-1, 1]; borrowing is forbidden.
    #[error("betting fraction {0} outside [-1, 1]")]
    FractionOutOfRange(f64),

    /// A coin outcome outside [-1, 1].
    #[error("coin outcome {0} outside [-1, 1]")]
    CoinOutOfRange(f64),

    /// A reward vector whose norm exceeds the unit-ball contract.
    #[error("reward norm {0} exceeds 1 (unit-ball contract)")]
    RewardNormExceeded(f64),

    /// An expert reward outside [0, 1].
    #[error("expert reward {value} at index {index} outside [0, 1]")]
    ExpertRewardOutOfRange { index: usize, value: f64 },

    /// An input vector that should have unit norm does not.
    #[error("input vector norm {0} is not 1 within 1e-9")]
    InputNotNormalized(f64),

    /// An operation that needs at least one element got none.
    #[error("empty sequence passed to {0}")]
    EmptySequence(&'static str),

    /// An iterative solver failed to reach its tolerance.
    #[error("{op} did not converge within {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: u32 },

    /// A function evaluated to a non-finite value where finiteness is required.
    #[error("non-finite value in {op} at x = {x}")]
    NonFinite { op: &'static str, x: f64 },

    /// A quantity that is provably bounded in exact arithmetic exceeded its
    /// floating-point tolerance; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),

    /// Malformed sparse-example text input.
    #[error(transparent)]
    Parse(#[from] crate::harness::ParseError),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            op,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
