use thiserror::Error;

/// Errors raised by the geometric and combinatorial routines of this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polytope must be full-dimensional (dim {dim} in ambient dimension {ambient})")]
    NotFullDimensional { dim: usize, ambient: usize },

    #[error("polytope has no facets")]
    NoFacets,

    #[error("dilation factor must be positive")]
    ZeroDilation,

    #[error("cone is not pointed")]
    NotPointed,

    #[error("generators are not contained in an open halfspace")]
    NoPositiveGrading,

    #[error("polytope is not integrally closed")]
    NotIntegrallyClosed,

    #[error("polytope contains no lattice point")]
    NoLatticePoint,

    #[error("containment violated: {0}")]
    NotContained(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bit source exhausted: needed {needed} bits, {available} available")]
    BitsExhausted { needed: u64, available: u64 },

    #[error("resource cap exceeded: {what} ({size} > {cap})")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
