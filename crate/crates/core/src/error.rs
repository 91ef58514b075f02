use thiserror::Error;

use crate::chow::DivisorClass;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-integral Euler characteristic: {0}")]
    NonIntegral(String),

    #[error("inadmissible monad shape: {0}")]
    InvalidShape(String),

    #[error("rank must be positive")]
    ZeroRank,

    #[error("unsupported rank {0} (only 1 and 2 are supported)")]
    UnsupportedRank(i64),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("negative degree {0:?}")]
    NegativeDegree([i64; 3]),

    #[error("interpolation failed: {0}")]
    Interpolation(String),

    #[error("monad generation exhausted {attempts} attempts; last failure: {last}")]
    GenerationExhausted { attempts: usize, last: String },

    #[error("malformed monad file at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("prime mismatch: file uses {found}, caller requested {requested}")]
    PrimeMismatch { found: String, requested: String },

    #[error("cohomology of twist {twist} is not pad-stable: {dims_pad:?} at pad {pad} vs {dims_next:?} at pad {next}")]
    PadInstability {
        twist: DivisorClass,
        pad: i64,
        next: i64,
        dims_pad: Vec<usize>,
        dims_next: Vec<usize>,
    },

    #[error("Euler characteristic mismatch for {what}: computed {computed}, expected {expected}")]
    EulerMismatch {
        what: String,
        computed: i64,
        expected: i64,
    },

    #[error("complex is not quasi-isomorphic to a sheaf in degree 0: {0}")]
    SpuriousCohomology(String),

    #[error("non-generic instanton: divisor has unexpected bidegree ({0})")]
    NonGenericDivisor(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
