use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Pauli symbol {0:?}; expected one of I, X, Y, Z")]
    InvalidPauliSymbol(char),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid spin system: {0}")]
    InvalidSpinSystem(String),
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (defect ‖U†U − I‖ = {0:.3e})")]
    NotUnitary(f64),
    #[error("duration must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("invalid channel weights: {0}")]
    InvalidWeights(String),
    #[error("invalid relaxation rates: {0}")]
    InvalidRates(String),
    #[error("fidelity has non-negligible imaginary part {0:.3e}")]
    ComplexFidelity(f64),
    #[error("qubit {index} out of range for a {n_qubits}-qubit system")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("gate cannot be compiled to pulses: {0}")]
    UnsupportedGate(String),
    #[error("invalid rf distribution: {0}")]
    InvalidDistribution(String),
    #[error("field scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("series has {len} samples; at least {min} are required")]
    SeriesTooShort { len: usize, min: usize },
    #[error("unknown model {0:?}; expected incoherent or decoherent")]
    UnknownModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
