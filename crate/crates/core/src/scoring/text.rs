use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '-' | '\u{2019}')
}

/// Lowercases and splits a response into word tokens.
///
/// A token is a run of alphanumerics, optionally joined by single internal
/// apostrophes or hyphens (`don't`, `x-ray`). Everything else is a boundary.
/// Curly apostrophes are folded to `'`. No stemming.
pub fn normalize_text(raw: &str) -> Vec<String> {
    let chars: Vec<char> = raw
        .chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if is_word_char(c) {
            current.push(c);
        } else if is_joiner(c)
            && !current.is_empty()
            && chars.get(i + 1).copied().is_some_and(is_word_char)
        {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        i += 1;
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Affirmation {
    Yes,
    No,
    Unparsed,
}

impl Affirmation {
    pub fn as_str(self) -> &'static str {
        match self {
            Affirmation::Yes => "yes",
            Affirmation::No => "no",
            Affirmation::Unparsed => "unparsed",
        }
    }
}

impl fmt::Display for Affirmation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Affirmation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "yes" => Ok(Affirmation::Yes),
            "no" => Ok(Affirmation::No),
            "unparsed" => Ok(Affirmation::Unparsed),
            other => Err(format!("unknown affirmation `{other}`")),
        }
    }
}

/// Token lists that mark a yes or a no answer to a membership question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffirmationMarkers {
    pub yes: Vec<String>,
    pub no: Vec<String>,
}

impl Default for AffirmationMarkers {
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        AffirmationMarkers {
            yes: v(&["yes", "included", "correct", "true"]),
            no: v(&["no", "not", "none", "false"]),
        }
    }
}

impl AffirmationMarkers {
    /// Whichever marker set matches first in token order wins.
    pub fn detect(&self, tokens: &[String]) -> Affirmation {
        for t in tokens {
            if self.yes.iter().any(|m| m == t) {
                return Affirmation::Yes;
            }
            if self.no.iter().any(|m| m == t) {
                return Affirmation::No;
            }
        }
        Affirmation::Unparsed
    }
}

pub fn detect_affirmation(raw: &str) -> Affirmation {
    AffirmationMarkers::default().detect(&normalize_text(raw))
}
