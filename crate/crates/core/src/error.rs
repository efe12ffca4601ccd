use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty file: no header or no data rows")]
    EmptyFile,
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("empty column name at position {0}")]
    EmptyColumnName(usize),
    #[error("label {0:?} is not a column")]
    UnknownLabel(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("all rows dropped by the missing-value policy")]
    AllRowsDropped,
    #[error("column {column:?}, row {row}: {value:?} is not a finite number")]
    NotNumeric {
        column: String,
        row: usize,
        value: String,
    },
    #[error("at least 2 bins are required, got {0}")]
    InvalidBins(usize),
    #[error("attribute index {0} is out of range")]
    InvalidAttribute(usize),
    #[error("attribute index {0} appears more than once")]
    DuplicateAttribute(usize),
    #[error("attribute sets must be disjoint")]
    Overlap,
    #[error("attribute set must not be empty")]
    EmptySet,
    #[error("{0}")]
    InvalidArgument(String),
    #[error("joint cell space too large to index")]
    TableTooLarge,
    #[error("degenerate label: label entropy is zero")]
    DegenerateLabel,
    #[error("joint entropy is zero; normed measure undefined")]
    ZeroEntropy,
    #[error("internal consistency: {what} = {value:e} should be nonnegative")]
    Inconsistent { what: &'static str, value: f64 },
    #[error("untestable: a single-valued attribute leaves zero degrees of freedom")]
    Untestable,
    #[error("no label attribute designated")]
    NoLabel,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
