use std::collections::HashMap;

use super::{Completion, Conversation, Subject, SubjectError, TrialContext};
use crate::protocol::{CueType, Task, Trial};

/// The answer a rememberer with flawless list memory would give.
pub fn perfect_mock_policy(trial: &Trial, task: Task, study_list: &[String]) -> String {
    match task {
        Task::Familiarity => {
            if study_list.contains(&trial.cue) {
                "yes".into()
            } else {
                "no".into()
            }
        }
        Task::Identification => match (trial.cue_type, &trial.target) {
            (CueType::Unrelated, _) | (_, None) => "none".into(),
            (_, Some(target)) => target.clone(),
        },
        Task::Ordering => trial
            .ordinal_position()
            .and_then(|p| study_list.get(p - 1))
            .cloned()
            .unwrap_or_else(|| "none".into()),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PerfectMock;

impl Subject for PerfectMock {
    fn id(&self) -> String {
        "perfect-mock".into()
    }

    fn complete(
        &self,
        _conversation: &Conversation,
        ctx: TrialContext<'_>,
    ) -> Result<Completion, SubjectError> {
        Ok(Completion::local(match ctx.trial {
            Some(t) => perfect_mock_policy(t, ctx.plan.task, &ctx.plan.study_list),
            None => "OK".into(),
        }))
    }

    fn reads_prompts(&self) -> bool {
        false
    }
}

/// Answers from a fixed table keyed by cue word.
///
/// Script format: `cue<TAB>response` per line; a `*` cue sets the fallback
/// answer (default `none`). `#` lines are comments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedMock {
    answers: HashMap<String, String>,
    fallback: String,
}

impl ScriptedMock {
    pub fn parse(script: &str) -> Result<Self, SubjectError> {
        let mut answers = HashMap::new();
        let mut fallback = "none".to_string();
        for (i, line) in script.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (cue, answer) = line.split_once('\t').ok_or_else(|| {
                SubjectError::Config(format!("script line {}: expected cue<TAB>response", i + 1))
            })?;
            if cue == "*" {
                fallback = answer.to_string();
            } else {
                answers.insert(cue.trim().to_lowercase(), answer.to_string());
            }
        }
        Ok(ScriptedMock { answers, fallback })
    }
}

impl Subject for ScriptedMock {
    fn id(&self) -> String {
        "scripted-mock".into()
    }

    fn complete(
        &self,
        _conversation: &Conversation,
        ctx: TrialContext<'_>,
    ) -> Result<Completion, SubjectError> {
        let Some(trial) = ctx.trial else {
            return Ok(Completion::local("OK"));
        };
        Ok(Completion::local(
            self.answers
                .get(&trial.cue)
                .unwrap_or(&self.fallback)
                .clone(),
        ))
    }

    fn reads_prompts(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(cue: &str, cue_type: CueType, target: Option<&str>, index: usize) -> Trial {
        Trial {
            index,
            cue: cue.into(),
            cue_type,
            target: target.map(String::from),
        }
    }

    fn list() -> Vec<String> {
        ["alpha", "beta", "gamma"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_policy() {
        let l = list();
        assert_eq!(perfect_mock_policy(&t("beta", CueType::Copy, Some("beta"), 0), Task::Familiarity, &l), "yes");
        assert_eq!(perfect_mock_policy(&t("zeta", CueType::Unrelated, None, 0), Task::Familiarity, &l), "no");
        assert_eq!(perfect_mock_policy(&t("bet", CueType::Rhyme, Some("beta"), 0), Task::Familiarity, &l), "no");
        assert_eq!(perfect_mock_policy(&t("bet", CueType::Rhyme, Some("beta"), 0), Task::Identification, &l), "beta");
        assert_eq!(perfect_mock_policy(&t("zeta", CueType::Unrelated, None, 0), Task::Identification, &l), "none");
        assert_eq!(perfect_mock_policy(&t("third", CueType::Ordinal, Some("gamma"), 2), Task::Ordering, &l), "gamma");
    }

    #[test]
    fn script_lookup() {
        let m = ScriptedMock::parse("# demo\nchair\tYes it is\n*\tI don't know\n").unwrap();
        let plan = crate::protocol::assemble_ordinal_session(&list(), 1, crate::protocol::Timing::Immediate).unwrap();
        let conv = Conversation::new();
        let hit = t("chair", CueType::Copy, Some("chair"), 0);
        let miss = t("lamp", CueType::Copy, Some("lamp"), 0);
        let ctx = |trial| TrialContext { plan: &plan, trial: Some(trial) };
        assert_eq!(m.complete(&conv, ctx(&hit)).unwrap().text, "Yes it is");
        assert_eq!(m.complete(&conv, ctx(&miss)).unwrap().text, "I don't know");
        assert!(ScriptedMock::parse("no tab here\n").is_err());
    }
}
