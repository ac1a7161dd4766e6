use num_bigint::BigInt;
use thiserror::Error;

/// Errors raised by model construction, parsing and the verification oracles.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty matrix")]
    EmptyMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("exponent out of range: {exponent} is not in [1, {max}]")]
    ExponentOutOfRange { exponent: BigInt, max: BigInt },

    #[error("enumeration budget exceeded: {required} points required, budget is {budget}")]
    BudgetExceeded { required: BigInt, budget: BigInt },

    #[error("non-positive item size for variable {variable}")]
    NonPositiveItemSize { variable: String },

    #[error("item size of variable {variable} exceeds the capacity")]
    ItemSizeExceedsCapacity { variable: String },

    #[error("construction violated kC identity")]
    MassBalance,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
