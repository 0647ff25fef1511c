use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{normalize_text, Affirmation, AffirmationMarkers};
use crate::protocol::{CueType, Task, Timing, Trial};

/// Scoring flags for one response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialScore {
    /// Set for familiarity trials only.
    pub affirmation: Option<Affirmation>,
    pub target_present: bool,
    pub list_word_present: bool,
    /// Study-list words found in the response, in study-list order.
    pub matched_words: Vec<String>,
}

pub fn score_trial(
    trial: &Trial,
    raw: &str,
    study_list: &[String],
    task: Task,
    markers: &AffirmationMarkers,
) -> TrialScore {
    let tokens = normalize_text(raw);
    let present: HashSet<&str> = tokens.iter().map(String::as_str).collect();
    let target_present = trial
        .target
        .as_deref()
        .is_some_and(|t| present.contains(t));
    let matched_words: Vec<String> = study_list
        .iter()
        .filter(|w| present.contains(w.as_str()))
        .cloned()
        .collect();
    TrialScore {
        affirmation: (task == Task::Familiarity).then(|| markers.detect(&tokens)),
        target_present,
        list_word_present: !matched_words.is_empty(),
        matched_words,
    }
}

/// Identifies one task/timing test of a session and where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionMeta {
    pub session_id: String,
    pub seed: u64,
    pub task: Task,
    pub timing: Timing,
    pub corpus_id: String,
    pub subject_id: String,
}

/// One row of a scored-session file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredTrial {
    pub session_id: String,
    pub trial_index: usize,
    pub cue: String,
    pub cue_type: CueType,
    pub task: Task,
    pub timing: Timing,
    pub target: Option<String>,
    pub response: String,
    pub affirmation: Option<Affirmation>,
    pub target_present: bool,
    pub list_word_present: bool,
}

impl ScoredTrial {
    pub fn new(meta: &SessionMeta, trial: &Trial, response: &str, score: &TrialScore) -> Self {
        ScoredTrial {
            session_id: meta.session_id.clone(),
            trial_index: trial.index,
            cue: trial.cue.clone(),
            cue_type: trial.cue_type,
            task: meta.task,
            timing: meta.timing,
            target: trial.target.clone(),
            response: response.to_string(),
            affirmation: score.affirmation,
            target_present: score.target_present,
            list_word_present: score.list_word_present,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredSession {
    pub meta: SessionMeta,
    pub trials: Vec<ScoredTrial>,
}
