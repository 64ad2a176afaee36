use thiserror::Error;

/// Errors raised by the renormalization engine and its supporting types.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum IccrError {
    #[error("size mismatch: expected {expected} qubits, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("site {site} out of range for {n_qubits} qubits")]
    SiteOutOfRange { site: usize, n_qubits: usize },

    #[error("two-qubit gate needs distinct sites, got {0} twice")]
    IdenticalSites(usize),

    #[error("operator has imaginary phase {0}; a Hermitian string is required")]
    NotHermitian(String),

    #[error("zero-probability branch (p = {probability:e})")]
    ZeroProbability { probability: f64 },

    #[error("ancilla entangled: {0}")]
    AncillaEntangled(String),

    #[error("dense oracle limited to {cap} qubits, requested {requested}")]
    CapExceeded { cap: usize, requested: usize },

    #[error("invalid Renyi order {0}; orders must be positive")]
    InvalidOrder(f64),

    #[error("expected a {expected} gate, got {got}")]
    WrongGateArity { expected: &'static str, got: String },

    #[error("cannot parse Pauli string {input:?}: {reason}")]
    PauliParse { input: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = IccrError> = std::result::Result<T, E>;
