//! A parametric ecphory model: a simulated rememberer whose answers come
//! from combining a sampled memory-trace strength with a sampled cue
//! strength and comparing the result against per-task thresholds.

mod fit;
mod model;
mod params;
mod simulate;

pub use fit::{fit_to_benchmark, FitResult, GridAxis, GridSpec};
pub use model::{convert, ecphoric_value, EcphoricPoint, SemSubjectCore};
pub use params::{LureTrace, Param, SemParams, SynergyForm};
pub use simulate::{cue_valence, cue_valence_from_matrix, simulate_matrix, synthetic_corpus, Simulator};

use crate::kv::KvError;
use crate::protocol::{CueType, Task};

#[derive(Debug, thiserror::Error)]
pub enum SemError {
    #[error("value out of domain: {0}")]
    Domain(String),
    #[error("the model has no account of the {0} task")]
    UnsupportedTask(Task),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Kv(#[from] KvError),
    #[error("grid has no admissible candidates")]
    EmptyGrid,
    #[error("no {task} trials with {cue_type} cues; valence undefined")]
    UndefinedValence { cue_type: CueType, task: Task },
    #[error("target matrix: {0}")]
    Target(#[from] crate::scoring::ScoringError),
    #[error("simulation failed: {0}")]
    Simulation(String),
}
