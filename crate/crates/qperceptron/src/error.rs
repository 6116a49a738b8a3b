use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A bit pattern or sign vector violates its shape invariants.
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    /// Two vectors that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Register size outside the supported 1..=16 qubit range.
    #[error("register of {0} qubits exceeds simulator capacity (1..=16)")]
    Capacity(usize),

    /// A gate references a qubit outside the register.
    #[error("gate {gate} does not fit a {num_qubits}-qubit register")]
    GateIndex { gate: String, num_qubits: usize },

    /// A gate violates its structural invariants (empty control set, ...).
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    /// A dataset file line failed to parse.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Parsed values violate the dataset's documented ranges.
    #[error("{path}:{line}: validation failed: {msg}")]
    Validation {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// An operation received an empty input it cannot work with.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A hyperparameter is outside its documented range.
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparams(String),

    /// Experiment configuration is inconsistent or incomplete.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A model text record could not be decoded.
    #[error("invalid model record: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
