//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("price at index {index} is not strictly positive: {value}")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("series too short: {len} values, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}: cannot parse {cell:?} as a price")]
    BadCell { row: u64, cell: String },

    #[error("row {row}: price {value} is not strictly positive")]
    NonPositiveCell { row: u64, value: f64 },

    #[error("column {column:?} not found in header")]
    UnknownColumn { column: String },

    #[error("row {row}: no column at index {index}")]
    MissingColumn { index: usize, row: u64 },

    #[error("selected column contains no data rows")]
    EmptyColumn,

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scale {s} too large for series of length {n}")]
    ScaleTooLarge { s: usize, n: usize },

    #[error("box starting at {start} with size {s} does not fit a profile of length {len}")]
    BoxOutOfBounds { start: usize, s: usize, len: usize },

    #[error("box size {s} too small for polynomial order {poly_order}")]
    DegenerateBox { s: usize, poly_order: usize },

    #[error("all {n_boxes} boxes have zero fluctuation at scale {s}")]
    DegenerateScale { s: usize, n_boxes: usize },

    #[error("need at least {min} scales for a log-log fit, got {got}")]
    TooFewScales { got: usize, min: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("no values with magnitude below the threshold {threshold} to resample from")]
    EmptyTruncationPool { threshold: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("series length {n} is not a power of two")]
    NotPowerOfTwo { n: usize },

    #[error("the two spectra are not defined on the same q grid")]
    GridMismatch,

    #[error("realization {index} failed: {source}")]
    Realization {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("sweep point {param} failed: {source}")]
    SweepPoint {
        param: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
