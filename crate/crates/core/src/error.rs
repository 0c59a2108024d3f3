use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("density weight mismatch: {0} vs {1}")]
    WeightMismatch(Box<Scalar>, Box<Scalar>),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("variable `{name}` at position {pos} is out of range 1..{n}")]
    IndexOutOfRange { name: String, pos: usize, n: usize },

    #[error("expected a function of x only, found {0}")]
    NotBaseFunction(String),

    #[error("operator {0} requires a metric")]
    MissingMetric(&'static str),

    #[error("the formal adjoint is defined on half-densities only, got weight {0}")]
    AdjointWeight(Scalar),

    #[error("the extra bivector exists only for conformal geometry in dimension 2")]
    NoExtraBivector,

    #[error("Hochschild coboundary is not supported for arity {0}")]
    UnsupportedArity(usize),

    #[error("cochain arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("star-commutator numerator is not divisible by h")]
    NotDivisibleByNu,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("linear system: {0}")]
    LinearSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
