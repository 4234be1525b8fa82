use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("qubits {0} and {1} are not connected")]
    Disconnected(usize, usize),

    #[error("invalid qubit pair ({0}, {1}): {2}")]
    InvalidPair(usize, usize, String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("{qubits} qubits exceed the statevector bound of {max}")]
    Capacity { qubits: usize, max: usize },

    #[error("memory pair unavailable: {0}")]
    MemoryUnavailable(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
