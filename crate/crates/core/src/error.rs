use thiserror::Error;

use crate::complex::SimplexId;

/// Errors raised by the library. Violations of Morse or stratification
/// conditions found by the `check_*` and `validate_*` functions are returned
/// as data; these variants cover preconditions that make an operation
/// meaningless.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("simplex with no vertices")]
    EmptySimplex,
    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Vec<i64>),
    #[error("simplex {0:?} listed twice")]
    DuplicateSimplex(Vec<i64>),
    #[error("simplex {simplex:?} has face {face:?} which is not in the complex")]
    MissingFace { simplex: Vec<i64>, face: Vec<i64> },
    #[error("simplex {0:?} has no value")]
    MissingValue(Vec<i64>),
    #[error("unknown simplex id {0}")]
    UnknownSimplex(SimplexId),
    #[error("vertex {0} has no value in the vertex field")]
    MissingVertexValue(i64),
    #[error("vertex field is not injective: vertices {first} and {second} share value {value}")]
    NonInjectiveVertexField { first: i64, second: i64, value: f64 },
    #[error("function is not a discrete Morse function; offenders {offenders:?}")]
    NotAMorseFunction { offenders: Vec<SimplexId> },
    #[error("function is not a discrete stratified Morse function; offenders {offenders:?}")]
    NotADsmf { offenders: Vec<SimplexId> },
    #[error("({lower}, {upper}) is not a codimension-1 face pair")]
    NotAFacePair { lower: SimplexId, upper: SimplexId },
    #[error("simplex {0} occurs in more than one pair")]
    NotAMatching(SimplexId),
    #[error("vector field has a closed V-path through {witness:?}")]
    CyclicField { witness: Vec<SimplexId> },
    #[error("pair ({lower}, {upper}) crosses strata")]
    NonRespectingField { lower: SimplexId, upper: SimplexId },
    #[error("invalid stratification: {0}")]
    InvalidStratification(String),
    #[error("set is not downward closed: face {face} of {simplex} missing")]
    NotAComplex { simplex: SimplexId, face: SimplexId },
    #[error("complex has {size} simplices, above the bound {bound}")]
    ComplexTooLarge { size: usize, bound: usize },
    #[error("unknown strategy '{name}', available: {available}")]
    UnknownStrategy { name: String, available: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
