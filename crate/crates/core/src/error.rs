use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("dispersion matrix is not symmetric (largest asymmetry {max_gap:e})")]
    AsymmetricDispersion { max_gap: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e} at {eigenvector:?}")]
    NotPositiveSemidefinite {
        eigenvalue: f64,
        eigenvector: Vec<f64>,
    },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("bad generator parameter: {0}")]
    BadGeneratorParameter(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("matrix of {rows} rows has rank {rank}")]
    RankDeficient { rows: usize, rank: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index set must be nonempty and strictly increasing")]
    InvalidIndexSet,

    #[error("input matrix is not symmetric (largest asymmetry {max_gap:e})")]
    AsymmetricInput { max_gap: f64 },

    #[error("dimension {n} exceeds the enumeration bound {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("distributions use different characteristic generators")]
    GeneratorMismatch,

    #[error("radial atoms are tied to dimension {from}; the law in dimension {to} has no atom representation")]
    GeneratorNotReducible { from: usize, to: usize },

    #[error("parameter must be positive, got {0}")]
    NonPositiveParameter(f64),

    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),

    #[error("relation {relation} has no test functions in dimension {n}")]
    UnsupportedArity { relation: String, n: usize },

    #[error("moment guard tripped: {0}")]
    MomentGuardTripped(String),

    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
