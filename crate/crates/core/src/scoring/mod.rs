//! Turning raw responses into counts: token matching, yes/no detection and
//! proportion tables.

mod matrix;
mod score;
mod text;

pub use matrix::{tabulate, Cell, CellKey, MatrixMeta, ResultsMatrix};
pub use score::{score_trial, ScoredSession, ScoredTrial, SessionMeta, TrialScore};
pub use text::{detect_affirmation, normalize_text, Affirmation, AffirmationMarkers};

#[derive(Debug, thiserror::Error)]
pub enum ScoringError {
    #[error("results mix corpora `{0}` and `{1}`")]
    MixedCorpus(String, String),
    #[error("results mix subjects `{0}` and `{1}`")]
    MixedSubject(String, String),
    #[error("missing cells: {}", .0.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", "))]
    MissingCells(Vec<CellKey>),
}
