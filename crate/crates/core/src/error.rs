use thiserror::Error;

/// Errors raised by the simulator and the correlation analyzers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not Hermitian (relative residual {0:e})")]
    NotHermitian(f64),

    #[error("not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("subsystem dimensions {dims:?} do not multiply to {dim}")]
    InvalidSubsystems { dims: Vec<usize>, dim: usize },

    #[error("invalid subsystem index {index} for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    #[error("qubit amplitudes are not normalized (|alpha|^2+|beta|^2 = {0})")]
    NotNormalized(f64),

    #[error("state is not separable at this time (residual {0:e}); no joint eigenbasis exists")]
    NotSeparable(f64),

    #[error("measured subsystem must be a qubit, got dimension {0}")]
    MeasuredNotQubit(usize),

    #[error("total dimension {0} exceeds the oracle limit of 16")]
    OracleTooLarge(usize),

    #[error("phases are equal; there is no dephasing cycle")]
    NoDephasingCycle,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
