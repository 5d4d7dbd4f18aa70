use thiserror::Error;

pub type Result<T> = std::result::Result<T, PzError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PzError {
    /// Inconsistent shapes, non-finite entries, bad exponents.
    #[error("representation error: {0}")]
    Representation(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// A factor value outside [-1, 1].
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range (bound {bound})")]
    Index { index: usize, bound: usize },

    #[error("contraction factor undefined for a set without dependent generators")]
    UndefinedFactor,

    #[error("cannot split a set without dependent factors")]
    CannotSplit,

    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    Budget {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not computable: {0}")]
    NotComputable(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for PzError {
    fn from(e: std::io::Error) -> Self {
        PzError::Io(e.to_string())
    }
}
