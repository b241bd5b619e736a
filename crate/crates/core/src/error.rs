use std::fmt;
use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A row of input that could not be turned into a finite number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    /// 1-based line number in the input.
    pub line: u64,
    pub token: String,
}

impl fmt::Display for RejectedRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {} ({:?})", self.line, self.token)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("quantile level q must lie strictly inside (0, 1), got {0}")]
    InvalidQuantile(f64),

    #[error("alpha must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("probability must lie strictly inside (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("sample size must be at least 1")]
    InvalidSampleSize,

    #[error("sample is empty")]
    EmptySample,

    #[error("sample contains NaN at position {0}")]
    NanValue(usize),

    #[error("sample is not sorted: position {0} is greater than position {next}", next = .0 + 1)]
    Unsorted(usize),

    #[error("at least {min} bootstrap replications required, got {got}")]
    TooFewReplications { min: usize, got: usize },

    #[error("exact index pmf is limited to n <= {max}, got {n}")]
    SampleTooLarge { n: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("{path}: rejected {} row(s): {}", .rows.len(), join_rows(.rows))]
    Parse { path: String, rows: Vec<RejectedRow> },

    #[error("{path}: no numeric values found")]
    NoValues { path: String },

    #[error("{path}: csv column {column:?} not found in header")]
    MissingColumn { path: String, column: String },

    #[error("{path}: malformed csv: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join_rows(rows: &[RejectedRow]) -> String {
    const SHOWN: usize = 20;
    let mut out = rows
        .iter()
        .take(SHOWN)
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    if rows.len() > SHOWN {
        out.push_str(&format!(", ... ({} more)", rows.len() - SHOWN));
    }
    out
}
