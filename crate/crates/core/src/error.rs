use thiserror::Error;

use crate::families::TableError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} is out of range for domain '{domain}' of size {size}")]
    IndexOutOfRange { domain: String, index: usize, size: usize },

    #[error("domain mismatch: expected '{expected}', found '{found}'")]
    DomainMismatch { expected: String, found: String },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter for {variant}: {message}")]
    InvalidParameter { variant: &'static str, message: String },

    #[error("invalid table ({} problem(s)): {}", .0.len(), first_table_error(.0))]
    InvalidTable(Vec<TableError>),

    #[error(transparent)]
    NotInvertible(#[from] NotInvertible),

    #[error("network configuration error: {0}")]
    Config(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

fn first_table_error(errors: &[TableError]) -> String {
    errors.first().map(ToString::to_string).unwrap_or_default()
}

/// Witness explaining why a function column has no inverse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotInvertible {
    #[error("not invertible: inputs {first} and {second} both map to {output}")]
    Collision { first: usize, second: usize, output: usize },
    #[error("not invertible: output {output} is never produced")]
    Missing { output: usize },
}
