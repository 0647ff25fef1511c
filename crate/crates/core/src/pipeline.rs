//! Glue from raw transcripts to scored sessions.

use crate::scoring::{score_trial, AffirmationMarkers, ScoredSession, ScoredTrial, SessionMeta};
use crate::subject::Transcript;

pub fn session_meta(t: &Transcript, corpus_id: &str) -> SessionMeta {
    SessionMeta {
        session_id: t.session_id.clone(),
        seed: t.seed,
        task: t.task,
        timing: t.timing,
        corpus_id: corpus_id.to_string(),
        subject_id: t.subject_id.clone(),
    }
}

/// Scores every entry of a transcript against the study list it was run with.
pub fn score_transcript(
    t: &Transcript,
    study_list: &[String],
    corpus_id: &str,
    markers: &AffirmationMarkers,
) -> ScoredSession {
    let meta = session_meta(t, corpus_id);
    let trials = t
        .entries
        .iter()
        .map(|e| {
            let score = score_trial(&e.trial, &e.response, study_list, t.task, markers);
            ScoredTrial::new(&meta, &e.trial, &e.response, &score)
        })
        .collect();
    ScoredSession { meta, trials }
}
