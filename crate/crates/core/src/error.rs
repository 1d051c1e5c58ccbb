use thiserror::Error;

/// Which of the three logarithmic terms of the genie objective failed to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveTerm {
    /// The output-power term shared by both receivers.
    OutputPower,
    /// The conditional term attached to receiver 1's genie.
    Receiver1,
    /// The conditional term attached to receiver 2's genie.
    Receiver2,
}

impl std::fmt::Display for ObjectiveTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectiveTerm::OutputPower => write!(f, "output-power term"),
            ObjectiveTerm::Receiver1 => write!(f, "receiver-1 genie term"),
            ObjectiveTerm::Receiver2 => write!(f, "receiver-2 genie term"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),
    #[error("common power {common} outside [0, {power}]")]
    PowerOutOfRange { common: f64, power: f64 },
    #[error("invalid power allocation: {0}")]
    InvalidAllocation(String),
    #[error("allocation is not symmetric (P1 = {p1}, P2 = {p2})")]
    AsymmetricAllocation { p1: f64, p2: f64 },
    #[error("invalid genie parameters: {0}")]
    InvalidGenie(String),
    #[error("genie objective undefined: {term} has non-positive {part} ({value})")]
    Evaluation {
        term: ObjectiveTerm,
        part: &'static str,
        value: f64,
    },
    #[error("derivative anatomy undefined for zero cross gain")]
    ZeroGain,
    #[error("singular covariance block: {0}")]
    Singular(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("elimination produced {rows} rows (limit {limit})")]
    RowExplosion { rows: usize, limit: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
