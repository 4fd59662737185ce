use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expressions belong to different rings")]
    RingMismatch,

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("parse error in `{input}` at byte {pos}: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },

    #[error("`{0}` is not invertible in this ring (declare it as a denominator)")]
    NotInvertible(String),

    #[error("normalization exceeded {bound} rewrite steps; rule chain: {chain}")]
    StepBound { bound: usize, chain: String },

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("invariant `{invariant}` violated at {location}: {detail}")]
    Invariant {
        invariant: &'static str,
        location: String,
        detail: String,
    },

    #[error("missing data: {0}")]
    Missing(String),

    #[error("{what} is not horizontal: ver_{basis} = {witness}")]
    NotHorizontal {
        what: String,
        basis: String,
        witness: String,
    },

    #[error("`{0}` is not basic (some action field does not annihilate it)")]
    NotBasic(String),

    #[error("not expressible: {0}")]
    NotExpressible(String),

    #[error("{0} is not constant on the group")]
    NotConstant(String),

    #[error("spec error: {0}")]
    Spec(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invariant(
        invariant: &'static str,
        location: impl Into<String>,
        detail: impl Into<String>,
    ) -> Self {
        Error::Invariant {
            invariant,
            location: location.into(),
            detail: detail.into(),
        }
    }
}
