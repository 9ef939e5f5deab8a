//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("duplicate header name `{0}`")]
    DuplicateHeader(String),

    #[error("no usable rows after ingestion ({0} dropped)")]
    NoUsableRows(usize),

    #[error("dataset has {got} rows, need at least {needed}")]
    TooFewRows { needed: usize, got: usize },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("column `{0}` is not numeric")]
    ColumnNotNumeric(String),

    #[error("row index {index} out of range for {rows} rows")]
    RowIndexOutOfRange { index: usize, rows: usize },

    #[error("empty row selection")]
    EmptyRowSelection,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("fraction {0} yields an empty partition")]
    EmptyPartition(f64),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error(
        "pooled covariance is singular even after maximum ridge regularization \
         (degenerate data, e.g. all-constant columns)"
    )]
    SingularCovariance,

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error("design matrix is rank deficient (collinear terms)")]
    RankDeficient,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("column `{0}` has more than {1} distinct values; not usable as a stratum/group key")]
    TooManyLevels(String, usize),

    #[error("cannot split: the group column has a single distinct value")]
    SingleGroup,

    #[error("all pairwise distances are zero; rows are duplicates in the selected columns")]
    DegenerateDistances,

    #[error("simulation {index} failed: {source}")]
    Simulation {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}
