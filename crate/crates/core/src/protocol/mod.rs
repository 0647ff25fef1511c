//! Session design: which cues are shown, in what order, and how each trial is
//! worded for the subject.

mod render;
mod session;
mod types;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

pub use render::{render_conversation, render_study_preamble, Message, Role, Templates};
pub use session::{
    assemble_ordinal_session, assemble_session, SessionOptions, CUES_PER_TYPE, DIRECT_TRIALS,
    ORDINALS, ORDINAL_TRIALS,
};
pub use types::{CueType, SessionPlan, Task, Timing, Trial};

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error("ordinal count {count} out of range 1..={limit}")]
    Range { count: usize, limit: usize },
    #[error("{0}")]
    Mode(String),
    #[error("plan line {line}: {message}")]
    Plan { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct PlanLine {
    session_id: String,
    seed: u64,
    task: Task,
    timing: Timing,
    #[serde(flatten)]
    trial: Trial,
}

/// Writes a plan as JSON lines, one trial per line.
pub fn write_plan_jsonl<W: Write>(plan: &SessionPlan, mut out: W) -> Result<(), ProtocolError> {
    for t in &plan.trials {
        let line = PlanLine {
            session_id: plan.session_id.clone(),
            seed: plan.seed,
            task: plan.task,
            timing: plan.timing,
            trial: t.clone(),
        };
        serde_json::to_writer(&mut out, &line).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a plan written by [`write_plan_jsonl`]. The study list is not part
/// of the file and must be supplied.
pub fn read_plan_jsonl<R: BufRead>(
    reader: R,
    study_list: Vec<String>,
) -> Result<SessionPlan, ProtocolError> {
    let mut plan: Option<SessionPlan> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| ProtocolError::Plan {
            line: i + 1,
            message,
        };
        let pl: PlanLine = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let plan = plan.get_or_insert_with(|| SessionPlan {
            session_id: pl.session_id.clone(),
            seed: pl.seed,
            study_list: study_list.clone(),
            trials: Vec::new(),
            task: pl.task,
            timing: pl.timing,
        });
        if pl.session_id != plan.session_id || pl.task != plan.task || pl.timing != plan.timing {
            return Err(bad("line belongs to a different session".into()));
        }
        if pl.trial.index != plan.trials.len() {
            return Err(bad(format!("trial index {} out of order", pl.trial.index)));
        }
        plan.trials.push(pl.trial);
    }
    plan.ok_or(ProtocolError::Plan {
        line: 0,
        message: "empty plan file".into(),
    })
}
