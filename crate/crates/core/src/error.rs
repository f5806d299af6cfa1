use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not reach tolerance within {max_terms} terms")]
    NonConvergence { max_terms: usize },

    #[error("eta = 0: brackets degenerate, use the limit formula")]
    EtaZero,

    #[error("nodes coincide modulo the lattice (distance {distance:e})")]
    DegenerateNodes { distance: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("degenerate eta: {0}")]
    DegenerateEta(String),

    #[error("basis index {k} out of range 0..={n}")]
    IndexOutOfRange { k: usize, n: usize },

    #[error("operator of order {expected} applied to a function of order {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("extraction node makes the pivot basis function vanish")]
    SingularExtraction,

    #[error("weight has a pole: denominator factor {modulus:e} in modulus")]
    PoleHit { modulus: f64 },

    #[error("quadrature grid too coarse: doubling changed the value by {relative_change:e}")]
    GridTooCoarse { relative_change: f64 },

    #[error("invalid basis parameters: {0}")]
    InvalidBasis(String),

    #[error("linear system ill-conditioned (condition {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
