use rayon::prelude::*;

use super::model::{draw_normals, point_from_draws, trial_rng};
use super::{SemError, SemParams};
use crate::lexicon::{CorpusRow, CorpusTable, DISTRACTOR_COUNT, STUDY_LIST_LEN};
use crate::pipeline::score_transcript;
use crate::protocol::{assemble_session, CueType, SessionPlan, Task, Timing};
use crate::scoring::{tabulate, AffirmationMarkers, Cell, CellKey, ResultsMatrix, ScoredTrial};
use crate::subject::{run_session, RunOptions, SemSubject, Subject};

/// Placeholder corpus for simulated sessions. The model never reads the
/// words, so only the structure matters.
pub fn synthetic_corpus() -> CorpusTable {
    CorpusTable {
        rows: (0..STUDY_LIST_LEN)
            .map(|i| CorpusRow {
                target: format!("target{i:02}"),
                associate_cue: format!("assoc{i:02}"),
                rhyme_cue: format!("rhyme{i:02}"),
            })
            .collect(),
        distractors: (0..DISTRACTOR_COUNT).map(|i| format!("lure{i:02}")).collect(),
    }
}

fn plans(corpus: &CorpusTable, session_seed: u64) -> Vec<SessionPlan> {
    Task::DIRECT
        .into_iter()
        .flat_map(|task| {
            Timing::ALL
                .into_iter()
                .map(move |timing| assemble_session(corpus, session_seed, task, timing, Default::default()))
        })
        .collect()
}

fn check_sessions(sessions: usize) -> Result<(), SemError> {
    if sessions == 0 {
        return Err(SemError::InvalidParams("sessions must be >= 1".into()));
    }
    Ok(())
}

/// Runs `sessions` full direct-comparison sessions of the model subject
/// through the ordinary runner, scorer and tabulator. Session `i` uses plan
/// seed `seed + i`; the subject itself is seeded with `seed`.
pub fn simulate_matrix(params: &SemParams, sessions: usize, seed: u64) -> Result<ResultsMatrix, SemError> {
    params.validate()?;
    check_sessions(sessions)?;
    let corpus = synthetic_corpus();
    let corpus_id = corpus.fingerprint();
    let study_list = corpus.study_list();
    let subject = SemSubject::new(params.clone(), seed);
    let opts = RunOptions::default();
    let scored: Result<Vec<_>, SemError> = (0..sessions as u64)
        .into_par_iter()
        .flat_map_iter(|i| plans(&corpus, seed.wrapping_add(i)))
        .map(|plan| {
            let t = run_session(&plan, &subject as &dyn Subject, &opts)
                .map_err(|e| SemError::Simulation(e.to_string()))?;
            Ok(score_transcript(&t, &study_list, &corpus_id, &AffirmationMarkers::default()))
        })
        .collect();
    Ok(tabulate(&scored?)?)
}

/// Batch form of [`simulate_matrix`] for repeated evaluation: the session
/// plans and random draws are fixed up front, so each parameter set costs
/// only the threshold comparisons. Produces the same matrix as
/// [`simulate_matrix`] for the same `(sessions, seed)`.
#[derive(Debug, Clone)]
pub struct Simulator {
    sessions: usize,
    seed: u64,
    /// Per direct cell, in [`CellKey::direct`] order, the (trace, cue)
    /// standard-normal draws of every trial.
    draws: Vec<(CellKey, Vec<(f64, f64)>)>,
}

impl Simulator {
    pub fn new(sessions: usize, seed: u64) -> Result<Self, SemError> {
        check_sessions(sessions)?;
        let corpus = synthetic_corpus();
        let mut draws: Vec<(CellKey, Vec<(f64, f64)>)> =
            CellKey::direct().map(|k| (k, Vec::with_capacity(8 * sessions))).collect();
        for i in 0..sessions as u64 {
            for plan in plans(&corpus, seed.wrapping_add(i)) {
                for trial in &plan.trials {
                    let key = CellKey::new(trial.cue_type, plan.task, plan.timing);
                    let slot = draws.iter_mut().find(|(k, _)| *k == key).expect("direct cell");
                    let mut rng = trial_rng(seed, plan.seed, plan.timing, trial.index);
                    slot.1.push(draw_normals(&mut rng));
                }
            }
        }
        Ok(Simulator { sessions, seed, draws })
    }

    pub fn sessions(&self) -> usize {
        self.sessions
    }

    /// Passing trials per direct cell, in [`CellKey::direct`] order.
    pub fn counts(&self, params: &SemParams) -> [u64; 16] {
        let mut out = [0u64; 16];
        for (slot, (key, draws)) in out.iter_mut().zip(&self.draws) {
            let theta = match key.task {
                Task::Familiarity => params.theta_familiarity,
                _ => params.theta_identification,
            };
            *slot = draws
                .iter()
                .filter(|&&(zt, zc)| point_from_draws(params, key.cue_type, key.timing, zt, zc).value >= theta)
                .count() as u64;
        }
        out
    }

    pub fn proportions(&self, params: &SemParams) -> [f64; 16] {
        let counts = self.counts(params);
        let mut out = [0.0; 16];
        for ((o, c), (_, d)) in out.iter_mut().zip(counts).zip(&self.draws) {
            *o = c as f64 / d.len() as f64;
        }
        out
    }

    pub fn matrix(&self, params: &SemParams) -> Result<ResultsMatrix, SemError> {
        params.validate()?;
        let corpus = synthetic_corpus();
        let mut m = ResultsMatrix::default();
        for ((key, draws), count) in self.draws.iter().zip(self.counts(params)) {
            m.cells.insert(
                *key,
                Cell {
                    numerator: count as f64,
                    denominator: draws.len() as u64,
                    unparsed: 0,
                },
            );
        }
        for i in 0..self.sessions as u64 {
            let s = self.seed.wrapping_add(i);
            m.meta.session_ids.insert(format!("seed{s}"));
            m.meta.seeds.insert(s);
        }
        m.meta.corpus_id = Some(corpus.fingerprint());
        m.meta.subject_id = Some(SemSubject::new(params.clone(), self.seed).id());
        Ok(m)
    }
}

/// Share of `task` trials with `cue_type` cues that succeeded: a "yes" for
/// familiarity, the target in the response otherwise.
pub fn cue_valence(records: &[ScoredTrial], cue_type: CueType, task: Task) -> Result<f64, SemError> {
    let (mut hits, mut n) = (0usize, 0usize);
    for r in records.iter().filter(|r| r.cue_type == cue_type && r.task == task) {
        n += 1;
        let hit = match task {
            Task::Familiarity => r.affirmation == Some(crate::scoring::Affirmation::Yes),
            _ => r.target_present,
        };
        hits += hit as usize;
    }
    if n == 0 {
        return Err(SemError::UndefinedValence { cue_type, task });
    }
    Ok(hits as f64 / n as f64)
}

/// Valence read from an already tabulated cell.
pub fn cue_valence_from_matrix(
    m: &ResultsMatrix,
    cue_type: CueType,
    task: Task,
    timing: Timing,
) -> Result<f64, SemError> {
    match m.cell(cue_type, task, timing) {
        Some(c) if c.denominator > 0 => Ok(c.proportion()),
        _ => Err(SemError::UndefinedValence { cue_type, task }),
    }
}
