use thiserror::Error;

use crate::model::MoneyUnit;

pub type Result<T> = std::result::Result<T, ValuationError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValuationError {
    #[error("unit mismatch: {left} vs {right}")]
    UnitMismatch { left: MoneyUnit, right: MoneyUnit },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("discount rate {rate} must exceed growth rate {growth}")]
    GordonDivergence { rate: f64, growth: f64 },

    #[error("division by zero: {0}")]
    ZeroDenominator(String),

    #[error("{source_name}: line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}: line {line}, column `{column}`: {message}")]
    Validation {
        source_name: String,
        line: usize,
        column: String,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("no company files found in {0}")]
    EmptyCorpus(String),

    #[error("duplicate company name `{0}`")]
    DuplicateCompany(String),

    #[error("unknown company `{0}`")]
    UnknownCompany(String),

    #[error("cannot value {company}: {reason}")]
    Refused { company: String, reason: String },

    #[error("no peers left for `{0}` after excluding the target")]
    NoPeers(String),

    #[error("invalid risk-neutral probability {0} (must lie in [0, 1])")]
    InvalidProbability(f64),

    #[error("unknown table {0}; expected one of 2, 3, 4, 5, 6, 7, 18")]
    UnknownTable(u32),
}

impl ValuationError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ValuationError::InvalidInput(msg.into())
    }
}
