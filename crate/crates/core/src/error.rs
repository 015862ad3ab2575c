use alloc::string::String;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid representation dimension {0}")]
    InvalidDimension(usize),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("non-finite matrix entries")]
    NonFinite,

    #[error("matrix is not anti-Hermitian (defect {defect:e})")]
    NotAntiHermitian { defect: f64 },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("gauge transform is not unitary at t={t}, x={x} (defect {defect:e})")]
    InvalidTransform { t: f64, x: f64, defect: f64 },

    #[error("real inner product requested for complex entries (max imaginary part {max_imag:e})")]
    ComplexEntries { max_imag: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid under-resolves the kernel: dx = {dx:e} exceeds sigma/4 = {limit:e}")]
    UnderResolved { dx: f64, limit: f64 },

    #[error("linear solve did not converge (relative residual {residual:e}, tolerance {tolerance:e})")]
    SolverFailed { residual: f64, tolerance: f64 },

    #[error("distribution undefined: all weights vanish")]
    UndefinedDistribution,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
