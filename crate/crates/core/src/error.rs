use thiserror::Error;

/// Errors raised by simulator kernels, the compiler, runners and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("qubit index {index} out of range for {n_tot} qubits")]
    TargetOutOfRange { index: usize, n_tot: usize },

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numeric fault: {0}")]
    NumericFault(String),

    #[error("fit domain error: {0}")]
    FitDomain(String),

    #[error("degenerate baseline: |w_G| < 1e-12, gain factor undefined")]
    DegenerateBaseline,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SimError {
    pub fn contract(msg: impl Into<String>) -> Self {
        SimError::Contract(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
