use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("configuration {cfg} out of range for {n_qubits} qubits")]
    ConfigOutOfRange { cfg: u64, n_qubits: usize },

    #[error("invalid qubit count {0} (supported range 1..=64)")]
    InvalidQubitCount(usize),

    #[error("Pauli rotation generator must carry phase +1, found {0}")]
    NonUnitPhase(String),

    #[error("operator is not Hermitian (max imaginary residue {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("empty subspace after filtering")]
    EmptySubspace,

    #[error("{what} of size {size} exceeds guard {limit}")]
    GuardExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("unsupported Pauli weight {0} (expected 2 or 4)")]
    UnsupportedWeight(u32),

    #[error("calibration matrix for qubit {qubit} is singular (det = {det:.3e})")]
    SingularCalibration { qubit: usize, det: f64 },

    #[error("negative probability {0:.3e} in sampling distribution")]
    NegativeProbability(f64),

    #[error("negative variance {0:.3e}")]
    NegativeVariance(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
