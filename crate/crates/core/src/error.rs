use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter lies outside the range where the model is defined.
    #[error("{param} = {value} is out of range: {expected}")]
    Domain {
        param: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Malformed or inconsistent caller input (lengths, bitstrings, grids).
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn domain(param: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            param,
            value,
            expected,
        }
    }
}
