use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A geometric or mesh assumption the method relies on does not hold.
    #[error("assumption violated: {what} (element {element:?})")]
    AssumptionViolation { what: String, element: Option<usize> },

    #[error("matrix is singular (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn assumption(what: impl Into<String>, element: Option<usize>) -> Self {
        Error::AssumptionViolation {
            what: what.into(),
            element,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
