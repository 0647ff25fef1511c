use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Completion, Conversation, Subject, SubjectError, TrialContext};
use crate::protocol::{
    render_conversation, render_study_preamble, Message, SessionPlan, Task, Templates, Timing,
    Trial,
};

/// Response recorded for a trial whose request failed under
/// `continue_on_error`. Scores as an unparsed, non-matching answer.
pub const ERROR_SENTINEL: &str = "<error>";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub templates: Templates,
    /// Record failed trials with [`ERROR_SENTINEL`] instead of aborting.
    pub continue_on_error: bool,
    /// Pause before every request.
    pub request_delay: Duration,
}

#[derive(Debug, thiserror::Error)]
#[error("session {session_id}, {}: {source}", .index.map_or("preamble".to_string(), |i| format!("trial {i}")))]
pub struct RunError {
    pub session_id: String,
    /// `None` when the preamble failed.
    pub index: Option<usize>,
    #[source]
    pub source: SubjectError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub trial: Trial,
    pub response: String,
    pub latency_ms: u64,
    pub attempts: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Raw responses for one session plan, in trial order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub session_id: String,
    pub seed: u64,
    pub task: Task,
    pub timing: Timing,
    pub subject_id: String,
    /// Acknowledgement of the study preamble in delayed sessions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preamble_response: Option<String>,
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn errors(&self) -> usize {
        self.entries.iter().filter(|e| e.error.is_some()).count()
    }
}

fn timed(
    subject: &dyn Subject,
    conv: &Conversation,
    ctx: TrialContext<'_>,
    opts: &RunOptions,
) -> (Result<Completion, SubjectError>, u64) {
    if !opts.request_delay.is_zero() {
        std::thread::sleep(opts.request_delay);
    }
    let start = Instant::now();
    let out = subject.complete(conv, ctx);
    (out, start.elapsed().as_millis() as u64)
}

/// Presents every trial of `plan` to `subject`.
///
/// Immediate trials are independent one-message conversations. Delayed
/// sessions open with the study preamble and its acknowledgement, then add
/// each question and answer to the same conversation.
pub fn run_session(
    plan: &SessionPlan,
    subject: &dyn Subject,
    opts: &RunOptions,
) -> Result<Transcript, RunError> {
    let render = subject.reads_prompts();
    let fail = |index, source| RunError {
        session_id: plan.session_id.clone(),
        index,
        source,
    };
    let mut conv = Conversation::new();
    let mut preamble_response = None;
    if plan.timing == Timing::Delayed {
        if render {
            let msg = render_study_preamble(plan, &opts.templates)
                .map_err(|e| fail(None, SubjectError::Conversation(e.to_string())))?;
            conv.push(msg).map_err(|e| fail(None, e))?;
        }
        let ctx = TrialContext { plan, trial: None };
        let (ack, _) = timed(subject, &conv, ctx, opts);
        let ack = ack.map_err(|e| fail(None, e))?;
        if render {
            conv.push(Message::assistant(ack.text.clone()))
                .map_err(|e| fail(None, e))?;
        }
        preamble_response = Some(ack.text);
    }

    let mut entries = Vec::with_capacity(plan.trials.len());
    for trial in &plan.trials {
        let ctx = TrialContext {
            plan,
            trial: Some(trial),
        };
        let pushed = if render {
            let msgs = render_conversation(plan, trial, &opts.templates);
            let n = msgs.len();
            if plan.timing == Timing::Immediate {
                conv = Conversation::from_messages(msgs).map_err(|e| fail(Some(trial.index), e))?;
            } else {
                for m in msgs {
                    conv.push(m).map_err(|e| fail(Some(trial.index), e))?;
                }
            }
            n
        } else {
            0
        };
        let (result, latency_ms) = timed(subject, &conv, ctx, opts);
        match result {
            Ok(c) => {
                if render && plan.timing == Timing::Delayed {
                    conv.push(Message::assistant(c.text.clone()))
                        .map_err(|e| fail(Some(trial.index), e))?;
                }
                entries.push(TranscriptEntry {
                    trial: trial.clone(),
                    response: c.text,
                    latency_ms,
                    attempts: c.attempts,
                    error: None,
                });
            }
            Err(e) if opts.continue_on_error => {
                if plan.timing == Timing::Delayed {
                    for _ in 0..pushed {
                        conv.pop();
                    }
                }
                let attempts = match &e {
                    SubjectError::Transport { attempts, .. } => *attempts,
                    _ => 1,
                };
                entries.push(TranscriptEntry {
                    trial: trial.clone(),
                    response: ERROR_SENTINEL.into(),
                    latency_ms,
                    attempts,
                    error: Some(e.to_string()),
                });
            }
            Err(e) => return Err(fail(Some(trial.index), e)),
        }
    }
    Ok(Transcript {
        session_id: plan.session_id.clone(),
        seed: plan.seed,
        task: plan.task,
        timing: plan.timing,
        subject_id: subject.id(),
        preamble_response,
        entries,
    })
}

/// Runs plans with up to `parallel` sessions in flight. Results keep the
/// order of `plans`.
pub fn run_sessions(
    plans: &[SessionPlan],
    subject: &dyn Subject,
    opts: &RunOptions,
    parallel: usize,
) -> Vec<Result<Transcript, RunError>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        plans
            .par_iter()
            .map(|p| run_session(p, subject, opts))
            .collect()
    })
}

/// One JSON object per line: a header line then one line per entry.
pub fn write_transcript_jsonl<W: Write>(t: &Transcript, mut out: W) -> std::io::Result<()> {
    let header = Transcript {
        entries: Vec::new(),
        ..t.clone()
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for e in &t.entries {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_transcript_jsonl<R: BufRead>(reader: R) -> std::io::Result<Transcript> {
    let bad = |line: usize, e: serde_json::Error| {
        std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {line}: {e}"))
    };
    let mut lines = reader.lines();
    let first = lines.next().transpose()?.ok_or_else(|| {
        std::io::Error::new(std::io::ErrorKind::InvalidData, "empty transcript")
    })?;
    let mut t: Transcript = serde_json::from_str(&first).map_err(|e| bad(1, e))?;
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        t.entries
            .push(serde_json::from_str(&line).map_err(|e| bad(i + 2, e))?);
    }
    Ok(t)
}
