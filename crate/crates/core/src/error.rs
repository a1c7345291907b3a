use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must be square with order at least 2, got {rows} rows and row {row} has {cols} columns")]
    Dimension { rows: usize, row: usize, cols: usize },

    #[error("matrix order must be at least 2, got {0}")]
    TooSmall(usize),

    #[error("declared {class} but entries ({i}, {j}) and ({j}, {i}) disagree: {aij} vs {aji}")]
    SymmetryViolation {
        class: &'static str,
        i: usize,
        j: usize,
        aij: f64,
        aji: f64,
    },

    #[error("declared hollow but diagonal entry ({i}, {i}) is {value}")]
    HollowViolation { i: usize, value: f64 },

    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("not a permutation of 1..={n}: {reason}")]
    InvalidPermutation { n: usize, reason: String },

    #[error("operation requires symmetric inputs, got {0}")]
    RequiresSymmetric(&'static str),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error("exact enumeration of N = {n} needs {count} permutations, above the cap N <= {cap}")]
    CapExceeded { n: usize, cap: usize, count: u128 },

    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
