use thiserror::Error;

/// Errors produced by the kernel, quadrature, and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} = {value} ({constraint})")]
    Domain {
        what: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("index {index} out of range 1..={max}")]
    Index { index: usize, max: usize },

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("undefined sample at node {0}")]
    UndefinedSample(usize),

    #[error("exponent function violates its declared bounds: {0}")]
    ExponentBounds(String),

    #[error("pair does not carry an exponent function; {0}")]
    NotVariableExponent(&'static str),

    #[error("ill-conditioned step at node {node}: diagonal {diagonal:e}")]
    IllConditioned { node: usize, diagonal: f64 },

    #[error("extrapolation input rejected: {0}")]
    Extrapolation(String),

    #[error("generalized Sonine condition not met: {0}")]
    GscFailure(String),

    #[error("invalid right-hand side: {0}")]
    Rhs(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, constraint: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        constraint,
    }
}
