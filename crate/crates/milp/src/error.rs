use thiserror::Error;

#[derive(Debug, Error)]
pub enum MilpError {
    #[error("row {row} references undeclared variable index {index}")]
    UndeclaredVariable { row: String, index: usize },
    #[error("variable {0} has an infinite bound")]
    UnboundedVariable(String),
    #[error("variable {0} has lower bound above upper bound")]
    EmptyDomain(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
    #[error("LP engine failure: {0}")]
    Numeric(String),
    #[error("solution file line {line}: {message}")]
    SolutionFile { line: usize, message: String },
}
