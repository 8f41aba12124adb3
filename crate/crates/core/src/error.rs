use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NilError {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// The skew form B_λ is (numerically) degenerate, i.e. λ lies outside the
    /// set where the symplectic frame exists.
    #[error("B_lambda is degenerate: smallest singular value {smallest:e} <= tolerance {tolerance:e}")]
    Nondegeneracy { smallest: f64, tolerance: f64 },

    /// An integrand has not decayed at the edge of its quadrature box.
    #[error("integrand not decayed at quadrature box edge: |f| = {edge:e} > {threshold:e}")]
    Truncation { edge: f64, threshold: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl NilError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        NilError::InvalidInput(msg.into())
    }
}

impl From<std::io::Error> for NilError {
    fn from(e: std::io::Error) -> Self {
        NilError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NilError>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(NilError::DimensionMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}
