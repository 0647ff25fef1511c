use std::collections::{BTreeMap, BTreeSet};

use super::{Affirmation, ScoredSession, ScoringError};
use crate::protocol::{CueType, Task, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub cue_type: CueType,
    pub task: Task,
    pub timing: Timing,
}

impl CellKey {
    pub fn new(cue_type: CueType, task: Task, timing: Timing) -> Self {
        CellKey {
            cue_type,
            task,
            timing,
        }
    }

    /// The 16 direct-comparison cells in table order: rows by cue type,
    /// columns familiarity/immediate, familiarity/delayed,
    /// identification/immediate, identification/delayed.
    pub fn direct() -> impl Iterator<Item = CellKey> {
        CueType::DIRECT.into_iter().flat_map(|c| {
            Task::DIRECT
                .into_iter()
                .flat_map(move |task| Timing::ALL.into_iter().map(move |t| CellKey::new(c, task, t)))
        })
    }
}

impl std::fmt::Display for CellKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{}", self.cue_type, self.task, self.timing)
    }
}

/// A proportion with its counts. The numerator is fractional only for
/// published tables whose proportions were rounded.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cell {
    pub numerator: f64,
    pub denominator: u64,
    /// Familiarity responses with no recognizable yes/no; already counted in
    /// the denominator as non-affirmations.
    pub unparsed: u64,
}

impl Cell {
    pub fn from_proportion(proportion: f64, denominator: u64) -> Self {
        Cell {
            numerator: proportion * denominator as f64,
            denominator,
            unparsed: 0,
        }
    }

    pub fn proportion(&self) -> f64 {
        if self.denominator == 0 {
            0.0
        } else {
            self.numerator / self.denominator as f64
        }
    }

    pub fn unparsed_rate(&self) -> f64 {
        if self.denominator == 0 {
            0.0
        } else {
            self.unparsed as f64 / self.denominator as f64
        }
    }

    fn add(&mut self, other: &Cell) {
        self.numerator += other.numerator;
        self.denominator += other.denominator;
        self.unparsed += other.unparsed;
    }

    fn record(&mut self, hit: bool, unparsed: bool) {
        self.denominator += 1;
        if hit {
            self.numerator += 1.0;
        }
        if unparsed {
            self.unparsed += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatrixMeta {
    pub session_ids: BTreeSet<String>,
    pub seeds: BTreeSet<u64>,
    pub subject_id: Option<String>,
    pub corpus_id: Option<String>,
    pub note: Option<String>,
}

/// Proportions per cue type, task and timing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsMatrix {
    pub cells: BTreeMap<CellKey, Cell>,
    /// Ordering results per (timing, 1-based list position).
    pub ordinal_positions: BTreeMap<(Timing, usize), Cell>,
    pub meta: MatrixMeta,
}

impl ResultsMatrix {
    pub fn cell(&self, cue_type: CueType, task: Task, timing: Timing) -> Option<&Cell> {
        self.cells.get(&CellKey::new(cue_type, task, timing))
    }

    /// Proportion of a cell, or `None` if the cell is absent.
    pub fn get(&self, cue_type: CueType, task: Task, timing: Timing) -> Option<f64> {
        self.cell(cue_type, task, timing).map(Cell::proportion)
    }

    pub fn sessions(&self) -> usize {
        self.meta.session_ids.len()
    }

    /// Direct-comparison cells that are absent or empty.
    pub fn missing_direct_cells(&self) -> Vec<CellKey> {
        CellKey::direct()
            .filter(|k| self.cells.get(k).is_none_or(|c| c.denominator == 0))
            .collect()
    }

    /// The 16 direct-comparison proportions in table order.
    pub fn direct_values(&self) -> Result<[f64; 16], ScoringError> {
        let missing = self.missing_direct_cells();
        if !missing.is_empty() {
            return Err(ScoringError::MissingCells(missing));
        }
        let mut out = [0.0; 16];
        for (slot, key) in out.iter_mut().zip(CellKey::direct()) {
            *slot = self.cells[&key].proportion();
        }
        Ok(out)
    }

    pub fn total_observations(&self) -> u64 {
        self.cells.values().map(|c| c.denominator).sum()
    }

    /// Adds another matrix's counts. Commutative and associative over counts;
    /// fails if the two come from different corpora or subjects.
    pub fn merge(&mut self, other: &ResultsMatrix) -> Result<(), ScoringError> {
        merge_id(&mut self.meta.corpus_id, &other.meta.corpus_id, ScoringError::MixedCorpus)?;
        merge_id(&mut self.meta.subject_id, &other.meta.subject_id, ScoringError::MixedSubject)?;
        for (k, c) in &other.cells {
            self.cells.entry(*k).or_default().add(c);
        }
        for (k, c) in &other.ordinal_positions {
            self.ordinal_positions.entry(*k).or_default().add(c);
        }
        self.meta.session_ids.extend(other.meta.session_ids.iter().cloned());
        self.meta.seeds.extend(other.meta.seeds.iter().copied());
        Ok(())
    }
}

fn merge_id(
    mine: &mut Option<String>,
    theirs: &Option<String>,
    err: fn(String, String) -> ScoringError,
) -> Result<(), ScoringError> {
    match (mine.as_ref(), theirs) {
        (Some(a), Some(b)) if a != b => Err(err(a.clone(), b.clone())),
        (None, Some(b)) => {
            *mine = Some(b.clone());
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Aggregates scored sessions into proportions.
///
/// Familiarity cells count "yes" answers. Identification cells count
/// responses containing the trial's target; for unrelated cues, which have
/// no target, they count responses containing any study-list word. Ordering
/// cells count the target per position and pooled.
pub fn tabulate(sessions: &[ScoredSession]) -> Result<ResultsMatrix, ScoringError> {
    let mut m = ResultsMatrix::default();
    for s in sessions {
        let mut part = ResultsMatrix::default();
        part.meta.corpus_id = Some(s.meta.corpus_id.clone());
        part.meta.subject_id = Some(s.meta.subject_id.clone());
        part.meta.session_ids.insert(s.meta.session_id.clone());
        part.meta.seeds.insert(s.meta.seed);
        for t in &s.trials {
            let key = CellKey::new(t.cue_type, t.task, t.timing);
            let (hit, unparsed) = match t.task {
                Task::Familiarity => (
                    t.affirmation == Some(Affirmation::Yes),
                    t.affirmation == Some(Affirmation::Unparsed),
                ),
                Task::Identification if t.target.is_none() => (t.list_word_present, false),
                Task::Identification => (t.target_present, false),
                Task::Ordering => {
                    part.ordinal_positions
                        .entry((t.timing, t.trial_index + 1))
                        .or_default()
                        .record(t.target_present, false);
                    (t.target_present, false)
                }
            };
            part.cells.entry(key).or_default().record(hit, unparsed);
        }
        m.merge(&part)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::{ScoredTrial, SessionMeta};

    fn session(id: &str, corpus: &str, task: Task, rows: &[(CueType, Option<Affirmation>, bool, bool, bool)]) -> ScoredSession {
        let meta = SessionMeta {
            session_id: id.into(),
            seed: 1,
            task,
            timing: Timing::Immediate,
            corpus_id: corpus.into(),
            subject_id: "mock".into(),
        };
        let trials = rows
            .iter()
            .enumerate()
            .map(|(i, &(cue_type, affirmation, has_target, tp, lp))| ScoredTrial {
                session_id: id.into(),
                trial_index: i,
                cue: format!("c{i}"),
                cue_type,
                task,
                timing: Timing::Immediate,
                target: has_target.then(|| format!("t{i}")),
                response: String::new(),
                affirmation,
                target_present: tp,
                list_word_present: lp,
            })
            .collect();
        ScoredSession { meta, trials }
    }

    #[test]
    fn counts_by_rule() {
        let fam = session(
            "s1",
            "c",
            Task::Familiarity,
            &[
                (CueType::Copy, Some(Affirmation::Yes), true, false, true),
                (CueType::Copy, Some(Affirmation::Unparsed), true, false, false),
                (CueType::Unrelated, Some(Affirmation::No), false, false, false),
            ],
        );
        let id = session(
            "s1",
            "c",
            Task::Identification,
            &[
                (CueType::Rhyme, None, true, true, true),
                (CueType::Rhyme, None, true, false, true),
                (CueType::Unrelated, None, false, false, true),
            ],
        );
        let m = tabulate(&[fam, id]).unwrap();
        let copy = m.cell(CueType::Copy, Task::Familiarity, Timing::Immediate).unwrap();
        assert_eq!((copy.numerator, copy.denominator, copy.unparsed), (1.0, 2, 1));
        assert_eq!(copy.unparsed_rate(), 0.5);
        assert_eq!(m.get(CueType::Rhyme, Task::Identification, Timing::Immediate), Some(0.5));
        assert_eq!(m.get(CueType::Unrelated, Task::Identification, Timing::Immediate), Some(1.0));
        assert_eq!(m.total_observations(), 6);
        assert_eq!(m.sessions(), 1);
    }

    #[test]
    fn mixed_corpus_rejected() {
        let a = session("s1", "x", Task::Familiarity, &[(CueType::Copy, Some(Affirmation::Yes), true, false, true)]);
        let b = session("s2", "y", Task::Familiarity, &[(CueType::Copy, Some(Affirmation::Yes), true, false, true)]);
        assert!(matches!(tabulate(&[a, b]), Err(ScoringError::MixedCorpus(..))));
    }

    #[test]
    fn missing_cells_listed() {
        let a = session("s1", "x", Task::Familiarity, &[(CueType::Copy, Some(Affirmation::Yes), true, false, true)]);
        let m = tabulate(&[a]).unwrap();
        assert_eq!(m.missing_direct_cells().len(), 15);
        assert!(matches!(m.direct_values(), Err(ScoringError::MissingCells(v)) if v.len() == 15));
    }
}
