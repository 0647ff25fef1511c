use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use super::LexiconError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    LlmAssociate,
    Synonym,
    Antonym,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::LlmAssociate => "llm-associate",
            Relation::Synonym => "synonym",
            Relation::Antonym => "antonym",
        })
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "llm-associate" => Ok(Relation::LlmAssociate),
            "synonym" => Ok(Relation::Synonym),
            "antonym" => Ok(Relation::Antonym),
            other => Err(format!("unknown relation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    pub word: String,
    pub relation: Relation,
}

/// Head word to associates, in file order per head.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssociationLexicon {
    entries: BTreeMap<String, Vec<Association>>,
}

impl AssociationLexicon {
    /// Adds an association. Words are lowercased; self-associations and
    /// duplicates are rejected.
    pub fn insert(&mut self, head: &str, word: &str, relation: Relation) -> Result<(), String> {
        let head = head.trim().to_lowercase();
        let word = word.trim().to_lowercase();
        if head.is_empty() || word.is_empty() {
            return Err("empty word".into());
        }
        if head.chars().any(char::is_whitespace) || word.chars().any(char::is_whitespace) {
            return Err(format!("whitespace in `{head}` / `{word}`"));
        }
        if head == word {
            return Err(format!("`{head}` cannot be its own associate"));
        }
        let list = self.entries.entry(head).or_default();
        if !list.iter().any(|a| a.word == word) {
            list.push(Association { word, relation });
        }
        Ok(())
    }

    pub fn get(&self, head: &str) -> &[Association] {
        self.entries.get(head).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn heads(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads `head<TAB>associate<TAB>relation` lines. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn from_tsv<R: BufRead>(reader: R) -> Result<Self, LexiconError> {
        let mut lex = AssociationLexicon::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let bad = |message: String| LexiconError::Association {
                line: i + 1,
                message,
            };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [head, word, relation] = fields[..] else {
                return Err(bad(format!("expected 3 tab-separated fields, got {}", fields.len())));
            };
            let relation = relation.trim().parse().map_err(bad)?;
            lex.insert(head, word, relation).map_err(bad)?;
        }
        Ok(lex)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (head, list) in &self.entries {
            for a in list {
                out.push_str(&format!("{head}\t{}\t{}\n", a.word, a.relation));
            }
        }
        out
    }
}
