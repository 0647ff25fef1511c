use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CueType, ProtocolError, SessionPlan, Task, Timing, Trial};
use crate::lexicon::CorpusTable;

/// Trials per cue type in a direct-comparison session.
pub const CUES_PER_TYPE: usize = 8;
pub const DIRECT_TRIALS: usize = 4 * CUES_PER_TYPE;
pub const ORDINAL_TRIALS: usize = 20;

pub const ORDINALS: [&str; 20] = [
    "first",
    "second",
    "third",
    "fourth",
    "fifth",
    "sixth",
    "seventh",
    "eighth",
    "ninth",
    "tenth",
    "eleventh",
    "twelfth",
    "thirteenth",
    "fourteenth",
    "fifteenth",
    "sixteenth",
    "seventeenth",
    "eighteenth",
    "nineteenth",
    "twentieth",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SessionOptions {
    /// Let the copy, associate and rhyme groups draw their targets
    /// independently, so a target may be cued more than once.
    pub allow_target_reuse: bool,
}

/// Builds a randomized direct-comparison session.
///
/// The trial sequence depends only on `(corpus, seed, options)`: the
/// familiarity and identification plans for one seed present the same cues
/// in the same order.
pub fn assemble_session(
    corpus: &CorpusTable,
    seed: u64,
    task: Task,
    timing: Timing,
    options: SessionOptions,
) -> SessionPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_rows = corpus.rows.len();
    let groups: Vec<Vec<usize>> = if options.allow_target_reuse {
        (0..3)
            .map(|_| index::sample(&mut rng, n_rows, CUES_PER_TYPE).into_vec())
            .collect()
    } else {
        index::sample(&mut rng, n_rows, 3 * CUES_PER_TYPE)
            .into_vec()
            .chunks(CUES_PER_TYPE)
            .map(<[usize]>::to_vec)
            .collect()
    };
    let distractors = index::sample(&mut rng, corpus.distractors.len(), CUES_PER_TYPE);

    let mut trials = Vec::with_capacity(DIRECT_TRIALS);
    for (cue_type, rows) in [CueType::Copy, CueType::Associate, CueType::Rhyme]
        .into_iter()
        .zip(&groups)
    {
        for &r in rows {
            let row = &corpus.rows[r];
            let cue = match cue_type {
                CueType::Copy => &row.target,
                CueType::Associate => &row.associate_cue,
                _ => &row.rhyme_cue,
            };
            trials.push(Trial {
                index: 0,
                cue: cue.clone(),
                cue_type,
                target: Some(row.target.clone()),
            });
        }
    }
    for d in distractors {
        trials.push(Trial {
            index: 0,
            cue: corpus.distractors[d].clone(),
            cue_type: CueType::Unrelated,
            target: None,
        });
    }
    trials.shuffle(&mut rng);
    for (i, t) in trials.iter_mut().enumerate() {
        t.index = i;
    }

    SessionPlan {
        session_id: format!("seed{seed}"),
        seed,
        study_list: corpus.study_list(),
        trials,
        task,
        timing,
    }
}

/// Builds an ordering session asking for list positions 1..=count.
pub fn assemble_ordinal_session(
    study_list: &[String],
    count: usize,
    timing: Timing,
) -> Result<SessionPlan, ProtocolError> {
    let limit = study_list.len().min(ORDINALS.len());
    if count == 0 || count > limit {
        return Err(ProtocolError::Range { count, limit });
    }
    let trials = (0..count)
        .map(|i| Trial {
            index: i,
            cue: ORDINALS[i].to_string(),
            cue_type: CueType::Ordinal,
            target: Some(study_list[i].clone()),
        })
        .collect();
    Ok(SessionPlan {
        session_id: "ordinal".into(),
        seed: 0,
        study_list: study_list.to_vec(),
        trials,
        task: Task::Ordering,
        timing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::CorpusRow;
    use std::collections::{HashMap, HashSet};

    pub(crate) fn toy_corpus() -> CorpusTable {
        CorpusTable {
            rows: (0..48)
                .map(|i| CorpusRow {
                    target: format!("t{i}"),
                    associate_cue: format!("a{i}"),
                    rhyme_cue: format!("r{i}"),
                })
                .collect(),
            distractors: (0..16).map(|i| format!("d{i}")).collect(),
        }
    }

    #[test]
    fn session_shape() {
        let c = toy_corpus();
        let p = assemble_session(&c, 7, Task::Familiarity, Timing::Immediate, Default::default());
        assert_eq!(p.trials.len(), 32);
        let mut counts: HashMap<CueType, usize> = HashMap::new();
        for t in &p.trials {
            *counts.entry(t.cue_type).or_default() += 1;
        }
        for ct in CueType::DIRECT {
            assert_eq!(counts[&ct], 8, "{ct}");
        }
        let targets: HashSet<_> = p.trials.iter().filter_map(|t| t.target.clone()).collect();
        assert_eq!(targets.len(), 24);
        for (i, t) in p.trials.iter().enumerate() {
            assert_eq!(t.index, i);
            match t.cue_type {
                CueType::Copy => assert_eq!(t.target.as_ref(), Some(&t.cue)),
                CueType::Unrelated => assert!(t.target.is_none()),
                _ => assert_ne!(t.target.as_ref(), Some(&t.cue)),
            }
        }
    }

    #[test]
    fn cues_do_not_depend_on_task() {
        let c = toy_corpus();
        let f = assemble_session(&c, 7, Task::Familiarity, Timing::Delayed, Default::default());
        let i = assemble_session(&c, 7, Task::Identification, Timing::Delayed, Default::default());
        assert_eq!(f.trials, i.trials);
        let other = assemble_session(&c, 8, Task::Familiarity, Timing::Delayed, Default::default());
        assert_ne!(f.trials, other.trials);
    }

    #[test]
    fn target_reuse_flag_keeps_counts() {
        let c = toy_corpus();
        let opts = SessionOptions {
            allow_target_reuse: true,
        };
        let reused = (0..200u64).any(|s| {
            let p = assemble_session(&c, s, Task::Familiarity, Timing::Immediate, opts);
            assert_eq!(p.trials.len(), 32);
            let targets: HashSet<_> = p.trials.iter().filter_map(|t| t.target.clone()).collect();
            targets.len() < 24
        });
        assert!(reused);
    }

    #[test]
    fn ordinal_sessions() {
        let list = toy_corpus().study_list();
        let p = assemble_ordinal_session(&list, 20, Timing::Immediate).unwrap();
        assert_eq!(p.trials.len(), 20);
        assert_eq!(p.trials[0].cue, "first");
        assert_eq!(p.trials[0].target.as_deref(), Some("t0"));
        assert_eq!(p.trials[19].cue, "twentieth");
        assert_eq!(p.trials[2].ordinal_position(), Some(3));
        assert_eq!(p.task, Task::Ordering);
        let one = assemble_ordinal_session(&list, 1, Timing::Delayed).unwrap();
        assert_eq!(one.trials.len(), 1);
        assert_eq!(one.trials[0].target.as_deref(), Some("t0"));
        assert!(matches!(
            assemble_ordinal_session(&list, 49, Timing::Immediate),
            Err(ProtocolError::Range { count: 49, .. })
        ));
        assert!(assemble_ordinal_session(&list, 21, Timing::Immediate).is_err());
        assert!(assemble_ordinal_session(&list, 0, Timing::Immediate).is_err());
    }
}
