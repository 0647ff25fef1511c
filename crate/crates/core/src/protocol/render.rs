use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ProtocolError, SessionPlan, Task, Timing, Trial};
use crate::kv::{self, KvError};

const DEFAULT_TEMPLATES: &str = include_str!("../../data/templates.txt");

const TEMPLATE_NAMES: [&str; 8] = [
    "preamble",
    "familiarity_immediate",
    "familiarity_delayed",
    "identification_immediate",
    "identification_delayed",
    "ordering_immediate",
    "ordering_delayed",
    "associate",
];
const SLOTS: [&str; 3] = ["list", "cue", "ordinal"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Self {
        Message {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Message {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        })
    }
}

/// Named prompt templates with `{list}`, `{cue}` and `{ordinal}` slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    pub version: String,
    texts: BTreeMap<String, String>,
}

impl Default for Templates {
    fn default() -> Self {
        Templates::parse(DEFAULT_TEMPLATES).expect("built-in templates are valid")
    }
}

impl Templates {
    /// Parses a template file. Templates missing from the file keep their
    /// built-in text.
    pub fn parse(text: &str) -> Result<Self, KvError> {
        let mut texts = BTreeMap::new();
        let mut version = None;
        if text != DEFAULT_TEMPLATES {
            let base = Templates::default();
            texts = base.texts;
            version = Some(base.version);
        }
        for kv in kv::parse(text)? {
            if kv.key == "version" {
                version = Some(kv.value);
                continue;
            }
            if !TEMPLATE_NAMES.contains(&kv.key.as_str()) {
                return Err(KvError::new(kv.line, format!("unknown template `{}`", kv.key)));
            }
            let body = unescape(&kv.value);
            check_slots(&body).map_err(|m| KvError::new(kv.line, m))?;
            texts.insert(kv.key, body);
        }
        if let Some(missing) = TEMPLATE_NAMES.iter().find(|n| !texts.contains_key(**n)) {
            return Err(KvError::new(0, format!("missing template `{missing}`")));
        }
        Ok(Templates {
            version: version.unwrap_or_else(|| "unversioned".into()),
            texts,
        })
    }

    pub fn get(&self, name: &str) -> &str {
        &self.texts[name]
    }

    fn fill(&self, name: &str, list: &[String], cue: &str, ordinal: &str) -> String {
        self.get(name)
            .replace("{list}", &list.join(", "))
            .replace("{cue}", cue)
            .replace("{ordinal}", ordinal)
    }

    /// Prompt asking a model for one associate of `word`.
    pub fn associate_prompt(&self, word: &str) -> String {
        self.fill("associate", &[], word, "")
    }
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn check_slots(body: &str) -> Result<(), String> {
    let mut rest = body;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| "unclosed `{` in template".to_string())?;
        let slot = &after[..close];
        if !SLOTS.contains(&slot) {
            return Err(format!("unknown slot `{{{slot}}}`"));
        }
        rest = &after[close + 1..];
    }
    Ok(())
}

/// The memorize-the-list instruction that opens a delayed session.
pub fn render_study_preamble(
    plan: &SessionPlan,
    templates: &Templates,
) -> Result<Message, ProtocolError> {
    if plan.timing != Timing::Delayed {
        return Err(ProtocolError::Mode(
            "study preamble is only sent in delayed sessions".into(),
        ));
    }
    Ok(Message::user(templates.fill(
        "preamble",
        &plan.study_list,
        "",
        "",
    )))
}

/// Messages for one trial. Immediate trials carry the study list in the
/// single prompt; delayed trials carry only the question, since the list was
/// given once in the preamble.
pub fn render_conversation(plan: &SessionPlan, trial: &Trial, templates: &Templates) -> Vec<Message> {
    let name = format!("{}_{}", plan.task, plan.timing);
    let ordinal = match plan.task {
        Task::Ordering => trial
            .ordinal_position()
            .and_then(|p| super::ORDINALS.get(p - 1))
            .copied()
            .unwrap_or(trial.cue.as_str()),
        _ => "",
    };
    let list: &[String] = match plan.timing {
        Timing::Immediate => &plan.study_list,
        Timing::Delayed => &[],
    };
    vec![Message::user(templates.fill(&name, list, &trial.cue, ordinal))]
}
