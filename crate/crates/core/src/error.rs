use thiserror::Error;

/// Errors produced by the restoration library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("kernel of size {kernel:?} does not fit in a {image:?} image")]
    KernelTooLarge {
        kernel: (usize, usize),
        image: (usize, usize),
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value produced by the {0} step")]
    NonFinite(&'static str),

    #[error("inverse transform left an imaginary residue of {0:e}")]
    ImaginaryResidue(f64),

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error("malformed kernel spec `{0}` (expected `gaussian:<size>:<sigma>` or `mean:<size>`)")]
    KernelSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
