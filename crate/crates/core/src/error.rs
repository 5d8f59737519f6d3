use thiserror::Error;

/// A syntax error in expression text, with the byte offset where it was found.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn new(pos: usize, msg: impl Into<String>) -> Self {
        Self {
            pos,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("no value assigned to atom `{0}`")]
    MissingAssignment(String),

    #[error("scheme refers to `{0}`, which does not occur in the expression")]
    UnknownVariable(String),

    #[error("scheme lists `{0}` more than once")]
    DuplicateVariable(String),

    #[error("invalid scheme text `{0}`")]
    InvalidScheme(String),

    #[error("expression has no variables to order")]
    EmptyExpression,

    #[error("{0}")]
    InvalidParameter(String),

    #[error("too many variables for exhaustive search: {found} (limit {limit})")]
    TooManyVariables { found: usize, limit: usize },

    #[error("cannot draw {requested} distinct monomials, only {capacity} exist")]
    CapacityExceeded { requested: u64, capacity: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
