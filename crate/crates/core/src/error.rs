use thiserror::Error;

/// Failure modes shared by every module.
///
/// Everything except [`Error::Parse`] is a violated mathematical precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("negative value not allowed: {0}")]
    Negative(String),
    #[error("polynomial is not real-rooted")]
    NotRealRooted,
    #[error("polynomial is not multi-affine")]
    NotMultiAffine,
    #[error("size guard: {what} = {got} exceeds the limit {limit}")]
    SizeGuard {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for malformed input rather than bad mathematics.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, len })
    }
}

pub(crate) fn guard(what: &'static str, got: usize, limit: usize) -> Result<()> {
    if got <= limit {
        Ok(())
    } else {
        Err(Error::SizeGuard { what, got, limit })
    }
}
