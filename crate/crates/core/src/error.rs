use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid rational {0:?}")]
    InvalidRational(String),

    #[error("mass {total} ≠ 1")]
    Mass { total: Rational },

    #[error("negative {what} {value} at {location}")]
    Negative {
        what: &'static str,
        value: Rational,
        location: String,
    },

    #[error("non-positive probability {value} at {location}")]
    NonPositiveProbability { value: Rational, location: String },

    #[error("empty support")]
    EmptySupport,

    #[error("dimension mismatch: expected {expected} items, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("item count {0} outside 1..=16")]
    ItemCount(usize),

    #[error("menu is not normalized: {0}")]
    NotNormalized(String),

    #[error("menu is not strictly supermodular: {0}")]
    NotSupermodular(String),

    #[error("operation needs a {expected}-item menu, got {found} items")]
    WrongItemCount { expected: usize, found: usize },

    #[error("distribution is not IID")]
    NonIid,

    #[error("empty candidate list")]
    EmptyCandidates,

    #[error("no menu in the grid satisfies constraint {0}")]
    EmptyFeasibleSet(String),

    #[error("integer grid requested but the support has non-integer value {0}")]
    NonIntegerSupport(Rational),

    #[error("grid mismatch: {0}")]
    Grid(String),

    #[error("dominance check failed in {construction}: {details}")]
    DominanceViolated {
        construction: &'static str,
        details: String,
    },

    #[error("invalid numeric parameters: {0}")]
    InvalidParams(String),

    #[error("combinatorial limit exceeded: {count} pick multisets (limit {limit})")]
    CombinatorialLimit { count: u128, limit: u128 },

    #[error("linear program: {0}")]
    Lp(String),

    #[error("unknown reproduction target {0:?}")]
    UnknownTarget(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
