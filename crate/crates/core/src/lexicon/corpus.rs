use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{rhyme_tail, AssociationLexicon, DictIndex, LexiconError};

pub const STUDY_LIST_LEN: usize = 48;
pub const DISTRACTOR_COUNT: usize = 16;
pub const CORPUS_HEADER: &str = "target,associate_cue,rhyme_cue";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRow {
    pub target: String,
    pub associate_cue: String,
    pub rhyme_cue: String,
}

/// The study list with one associate and one rhyme cue per target, plus the
/// unrelated distractors. Row order is the study-list presentation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusTable {
    pub rows: Vec<CorpusRow>,
    pub distractors: Vec<String>,
}

/// How many cue candidates a study word has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coverage {
    pub word: String,
    pub associates: usize,
    pub rhymes: usize,
}

impl CorpusTable {
    pub fn study_list(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.target.clone()).collect()
    }

    /// Checks structural invariants, and rhyme validity when a dictionary is
    /// given.
    pub fn validate(&self, dict: Option<&DictIndex>) -> Result<(), LexiconError> {
        let invalid = |m: String| Err(LexiconError::InvalidCorpus(m));
        if self.rows.len() != STUDY_LIST_LEN {
            return invalid(format!("expected {STUDY_LIST_LEN} rows, got {}", self.rows.len()));
        }
        if self.distractors.len() != DISTRACTOR_COUNT {
            return invalid(format!(
                "expected {DISTRACTOR_COUNT} distractors, got {}",
                self.distractors.len()
            ));
        }
        let mut seen = HashSet::new();
        for r in &self.rows {
            if !seen.insert(r.target.as_str()) {
                return invalid(format!("duplicate target `{}`", r.target));
            }
            if r.associate_cue == r.target || r.rhyme_cue == r.target {
                return invalid(format!("cue equals its target `{}`", r.target));
            }
        }
        let cues: HashSet<&str> = self
            .rows
            .iter()
            .flat_map(|r| [&r.target, &r.associate_cue, &r.rhyme_cue])
            .map(String::as_str)
            .collect();
        let mut distinct = HashSet::new();
        for d in &self.distractors {
            if cues.contains(d.as_str()) || !distinct.insert(d.as_str()) {
                return invalid(format!("distractor `{d}` repeats a list word or cue"));
            }
        }
        if let Some(dict) = dict {
            for r in &self.rows {
                let tail = |w: &str| {
                    dict.primary(w)
                        .ok_or_else(|| LexiconError::UnknownWord(w.to_string()))
                        .and_then(|e| rhyme_tail(e).map(<[_]>::to_vec))
                };
                if tail(&r.target)? != tail(&r.rhyme_cue)? {
                    return invalid(format!("`{}` does not rhyme with `{}`", r.rhyme_cue, r.target));
                }
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CORPUS_HEADER}")?;
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.target, r.associate_cue, r.rhyme_cue)?;
        }
        Ok(())
    }

    pub fn write_distractors<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for d in &self.distractors {
            writeln!(out, "{d}")?;
        }
        Ok(())
    }

    pub fn read<R1: BufRead, R2: BufRead>(csv: R1, distractors: R2) -> Result<Self, LexiconError> {
        let mut rows = Vec::new();
        for (i, line) in csv.lines().enumerate() {
            let line = line?;
            if i == 0 {
                if line.trim() != CORPUS_HEADER {
                    return Err(LexiconError::InvalidCorpus(format!(
                        "expected header `{CORPUS_HEADER}`, found `{line}`"
                    )));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let [target, associate_cue, rhyme_cue] = f[..] else {
                return Err(LexiconError::InvalidCorpus(format!(
                    "line {}: expected 3 fields",
                    i + 1
                )));
            };
            rows.push(CorpusRow {
                target: target.to_lowercase(),
                associate_cue: associate_cue.to_lowercase(),
                rhyme_cue: rhyme_cue.to_lowercase(),
            });
        }
        let distractors = read_word_list(distractors)?;
        let table = CorpusTable { rows, distractors };
        table.validate(None)?;
        Ok(table)
    }

    /// Stable content hash, used to tell corpora apart in result files.
    pub fn fingerprint(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec");
        buf.push(b'\n');
        self.write_distractors(&mut buf).expect("write to Vec");
        let digest = Sha256::digest(&buf);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One lowercase word per line; blank lines and `#` comments skipped.
pub fn read_word_list<R: BufRead>(reader: R) -> Result<Vec<String>, LexiconError> {
    let mut words = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let w = line.trim();
        if w.is_empty() || w.starts_with('#') {
            continue;
        }
        words.push(w.to_lowercase());
    }
    Ok(words)
}

fn lowercase_set<'a>(words: impl IntoIterator<Item = &'a String>) -> HashSet<String> {
    words.into_iter().cloned().collect()
}

/// Candidate counts per study word, with study words and pool words excluded
/// as cues.
pub fn coverage(
    study_words: &[String],
    assoc: &AssociationLexicon,
    dict: &DictIndex,
    distractor_pool: &[String],
) -> Vec<Coverage> {
    let mut excluded = lowercase_set(study_words);
    excluded.extend(distractor_pool.iter().cloned());
    study_words
        .iter()
        .map(|w| Coverage {
            word: w.clone(),
            associates: assoc
                .get(w)
                .iter()
                .filter(|a| !excluded.contains(&a.word))
                .count(),
            rhymes: dict
                .find_rhymes(w, &excluded)
                .map(|r| r.len())
                .unwrap_or(0),
        })
        .collect()
}

/// Builds the cue table for a 48-word study list.
///
/// Associates are taken in lexicon order and rhymes in rank order, skipping
/// any word already used as a cue. Distractors are a seeded sample of the
/// pool, in sampled order.
pub fn build_corpus(
    study_words: &[String],
    assoc: &AssociationLexicon,
    dict: &DictIndex,
    distractor_pool: &[String],
    seed: u64,
) -> Result<CorpusTable, LexiconError> {
    if study_words.len() != STUDY_LIST_LEN {
        return Err(LexiconError::InvalidCorpus(format!(
            "study list must have {STUDY_LIST_LEN} words, got {}",
            study_words.len()
        )));
    }
    let study: HashSet<String> = lowercase_set(study_words);
    if study.len() != STUDY_LIST_LEN {
        return Err(LexiconError::InvalidCorpus("study list has duplicates".into()));
    }
    let pool: Vec<String> = {
        let mut seen = HashSet::new();
        distractor_pool
            .iter()
            .filter(|w| seen.insert(w.as_str()))
            .cloned()
            .collect()
    };
    if pool.len() < DISTRACTOR_COUNT {
        return Err(LexiconError::InvalidCorpus(format!(
            "distractor pool needs at least {DISTRACTOR_COUNT} distinct words, got {}",
            pool.len()
        )));
    }
    if let Some(w) = pool.iter().find(|w| study.contains(*w)) {
        return Err(LexiconError::InvalidCorpus(format!(
            "distractor `{w}` is a study word"
        )));
    }

    let deficient: Vec<String> = coverage(study_words, assoc, dict, &pool)
        .into_iter()
        .filter_map(|c| {
            let mut missing = Vec::new();
            if c.associates == 0 {
                missing.push("associate");
            }
            if c.rhymes == 0 {
                missing.push("rhyme");
            }
            (!missing.is_empty()).then(|| format!("{} (no {})", c.word, missing.join(", no ")))
        })
        .collect();
    if !deficient.is_empty() {
        return Err(LexiconError::Coverage(deficient));
    }

    let mut used = study.clone();
    used.extend(pool.iter().cloned());
    let mut rows = Vec::with_capacity(STUDY_LIST_LEN);
    let mut conflicts = Vec::new();
    for target in study_words {
        let associate = assoc
            .get(target)
            .iter()
            .map(|a| a.word.clone())
            .find(|w| !used.contains(w));
        let rhyme = dict.find_rhymes(target, &used)?.into_iter().find(|r| {
            associate.as_deref() != Some(r.as_str())
        });
        match (associate, rhyme) {
            (Some(a), Some(r)) => {
                used.insert(a.clone());
                used.insert(r.clone());
                rows.push(CorpusRow {
                    target: target.clone(),
                    associate_cue: a,
                    rhyme_cue: r,
                });
            }
            (a, _) => conflicts.push(format!(
                "{target} (candidates exhausted by earlier rows: {})",
                if a.is_none() { "associate" } else { "rhyme" }
            )),
        }
    }
    if !conflicts.is_empty() {
        return Err(LexiconError::Coverage(conflicts));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut distractors = pool;
    distractors.shuffle(&mut rng);
    distractors.truncate(DISTRACTOR_COUNT);

    let table = CorpusTable { rows, distractors };
    table.validate(Some(dict))?;
    Ok(table)
}
