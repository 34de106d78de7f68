use thiserror::Error;

/// Errors produced anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("FCIDUMP line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("FCIDUMP namelist is missing required key {0}")]
    MissingKey(&'static str),

    #[error("index {index} out of range for {what} of size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("excitation indices must be distinct, got {0:?}")]
    RepeatedIndex(Vec<usize>),

    #[error("{n_electrons} electrons do not fit in {n_qubits} spin-orbitals")]
    TooManyElectrons { n_electrons: usize, n_qubits: usize },

    #[error("{0} qubits exceeds the statevector cap of {max}", max = crate::statevector::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("sector dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("operator is not hermitian: expectation has imaginary part {0:e}")]
    NonHermitian(f64),

    #[error("objective returned NaN at evaluation {0}")]
    NanObjective(usize),

    #[error(
        "current overlap {0:e} is too small for the four-angle formula; use the direct gradient"
    )]
    VanishingOverlap(f64),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
