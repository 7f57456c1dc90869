use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("symmetry violation: {0}")]
    Symmetry(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidMonomial(_)
                | Error::Contract(_)
                | Error::Domain(_)
                | Error::Config(_)
                | Error::Parse { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
