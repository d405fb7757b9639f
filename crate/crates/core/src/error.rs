use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported matrix dimension {0}; this kernel handles 1, 2 and 4 only")]
    UnsupportedDimension(usize),

    #[error("non-finite entry ({0}) rejected")]
    NonFinite(String),

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} index {index} out of range 0..{bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("Kraus completeness violated: residual {residual:.3e} exceeds {tolerance:.1e}")]
    IncompleteKraus { residual: f64, tolerance: f64 },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("degenerate protocol point: {0}")]
    DegenerateProtocol(String),

    #[error("internal consistency violation: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
