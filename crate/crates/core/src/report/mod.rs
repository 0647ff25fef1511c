//! Result files, printed tables and comparison with the human benchmark.

mod benchmark;
mod compare;
mod files;
mod table;

use std::path::PathBuf;

pub use benchmark::{human_benchmark, BENCHMARK_NOTE, HUMAN_BENCHMARK, HUMAN_DENOMINATOR};
pub use compare::{
    compare, compare_to_human, fit_checks, qualitative_checks, render_comparison, spearman, Check,
    Comparison,
};
pub use files::{
    read_results_dir, read_session_csv, read_session_file, session_file_name, write_session_csv,
    write_session_files, SessionSidecar, SCORED_HEADER,
};
pub use table::{render_table, render_unparsed, TableStyle};

use crate::scoring::ScoringError;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<ReportError>,
    },
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error("{0}")]
    Invalid(String),
}

impl ReportError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ReportError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        match self {
            e @ (ReportError::Io { .. } | ReportError::File { .. }) => e,
            e => ReportError::File {
                path: path.into(),
                source: Box::new(e),
            },
        }
    }
}
