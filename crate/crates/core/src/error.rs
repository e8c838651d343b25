use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("Euclidean kernel entries must be real and non-negative")]
    NegativeEuclideanKernel,
    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },
    #[error("trace collapsed to {0:e} during imaginary-time evolution")]
    TraceCollapse(f64),
    #[error("overflow in imaginary-time propagation factor")]
    Overflow,
    #[error("wavepacket leaves the grid (escaped weight {0:e})")]
    GridEscape(f64),
    #[error("integral vanishes; ratio undefined")]
    VanishingIntegral,
    #[error("distribution has zero variance")]
    ZeroVariance,
    #[error("antipodal unit vectors: geodesic is not unique")]
    Antipodal,
    #[error("path is not closed")]
    OpenPath,
    #[error("Wigner transform has imaginary residue {0:e}")]
    NonRealWigner(f64),
    #[error("eigensolver failed to converge")]
    NoConvergence,
    #[error("matrix is singular")]
    Singular,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
