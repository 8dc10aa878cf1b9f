use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("map is not measure preserving: {0}")]
    InvalidMap(String),
    #[error("coupling marginals do not match: {0}")]
    MarginalMismatch(String),
    #[error("enumeration budget exceeded: {needed:.3e} > {limit:.3e} ({hint})")]
    BudgetExceeded {
        needed: f64,
        limit: f64,
        hint: &'static str,
    },
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
