use std::path::PathBuf;

use thiserror::Error;

use crate::gate::GateKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid coupling graph: {0}")]
    InvalidGraph(String),

    #[error("invalid coloring: {0}")]
    Coloring(String),

    #[error("lattice has no quasiperiodic fields assigned")]
    FieldsNotAssigned,

    #[error("RZZ angle {theta} (W = {w}) is outside the fractional window 0 < theta <= pi/2; W must be >= 4/pi")]
    AngleWindow { w: f64, theta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported gate {0:?} for this operation")]
    UnsupportedGate(GateKind),

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("circuit acts on {circuit} qubits but the state has {state}")]
    QubitCountMismatch { circuit: usize, state: usize },

    #[error("state needs {required_bytes} bytes, budget is {limit_bytes} bytes (raise the memory budget to override)")]
    Capacity { required_bytes: u128, limit_bytes: u128 },

    #[error("two-site gate on non-adjacent sites ({a}, {b})")]
    NotAdjacent { a: usize, b: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("insufficient data: need at least {needed} samples, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty fit window: {0}")]
    EmptyWindow(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical invariant violated: {0}")]
    NumericalInvariant(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error("sweep interrupted at task {task}, cycle {cycle}; resume from the checkpoint")]
    Interrupted { task: usize, cycle: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse { path: path.into(), message: message.to_string() }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 3,
            Error::NumericalInvariant(_) => 4,
            Error::Io { .. } | Error::Interrupted { .. } | Error::LinearAlgebra(_) => 1,
            _ => 2,
        }
    }
}
