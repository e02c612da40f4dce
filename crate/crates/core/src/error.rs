use thiserror::Error;

pub type Result<T> = std::result::Result<T, ZenoError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZenoError {
    #[error("invalid Pauli letter {0:?}")]
    InvalidPauliLetter(char),

    #[error("register size {0} out of range (1..={max})", max = crate::MAX_SPINS)]
    SpinCountOutOfRange(usize),

    #[error("unknown state label {0:?}")]
    UnknownLabel(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("time must be finite and non-negative, got {0}")]
    NegativeTime(f64),

    #[error("state vector is not normalized (norm² = {0})")]
    Unnormalized(f64),

    #[error("observable is the identity and does not split the space")]
    IdentityObservable,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("N = {0} is even: the long-time limit vanishes")]
    EvenProjectionCount(u32),

    #[error("N = {0} is odd: the 1/sqrt(e) crossing is not defined for odd projection counts")]
    OddProjectionCount(u32),

    #[error("no 1/sqrt(e) crossing found in [0, {upper}] ms")]
    NoCrossing { upper: f64 },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("fit did not converge after {0} iterations")]
    NotConverged(usize),

    #[error("fidelity {0} outside [0, 1]")]
    FidelityOutOfRange(f64),

    #[error("read-out correction factor {0} outside (0, 1]")]
    CorrectionFactorOutOfRange(f64),
}
