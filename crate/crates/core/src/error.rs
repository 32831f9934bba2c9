use thiserror::Error;

pub type Result<T> = std::result::Result<T, SrmError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SrmError {
    /// A numeric argument lies outside the domain of the operation.
    #[error("{name} = {value} is out of range: expected {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl SrmError {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        SrmError::Domain {
            name,
            value,
            expected,
        }
    }
}
