//! Pronouncing-dictionary parsing and rhyme lookup.
//!
//! Input is the classic CMU line format: `WORD  PH PH PH`, with alternate
//! pronunciations written `WORD(1)`, `WORD(2)` and comment lines starting with
//! `;;;`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use super::LexiconError;

/// The 39 ARPAbet symbols used by the CMU dictionary, without stress marks.
const VOWELS: [&str; 15] = [
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH", "IY", "OW", "OY", "UH", "UW",
];
const CONSONANTS: [&str; 24] = [
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N", "NG", "P", "R", "S", "SH", "T",
    "TH", "V", "W", "Y", "Z", "ZH",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stress {
    Unstressed,
    Primary,
    Secondary,
}

impl Stress {
    fn digit(self) -> char {
        match self {
            Stress::Unstressed => '0',
            Stress::Primary => '1',
            Stress::Secondary => '2',
        }
    }
}

/// One ARPAbet phoneme with its optional stress mark.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phoneme {
    symbol: &'static str,
    stress: Option<Stress>,
}

impl Phoneme {
    pub fn symbol(&self) -> &'static str {
        self.symbol
    }

    pub fn stress(&self) -> Option<Stress> {
        self.stress
    }

    pub fn is_vowel(&self) -> bool {
        VOWELS.contains(&self.symbol)
    }
}

impl fmt::Display for Phoneme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol)?;
        if let Some(s) = self.stress {
            write!(f, "{}", s.digit())?;
        }
        Ok(())
    }
}

impl FromStr for Phoneme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (base, stress) = match s.as_bytes().last() {
            Some(b'0') => (&s[..s.len() - 1], Some(Stress::Unstressed)),
            Some(b'1') => (&s[..s.len() - 1], Some(Stress::Primary)),
            Some(b'2') => (&s[..s.len() - 1], Some(Stress::Secondary)),
            _ => (s, None),
        };
        if let Some(v) = VOWELS.iter().find(|v| **v == base) {
            return Ok(Phoneme { symbol: v, stress });
        }
        if let Some(c) = CONSONANTS.iter().find(|c| **c == base) {
            if stress.is_some() {
                return Err(format!("stress mark on consonant `{s}`"));
            }
            return Ok(Phoneme { symbol: c, stress });
        }
        Err(format!("unknown phoneme `{s}`"))
    }
}

/// A single dictionary row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneEntry {
    pub word: String,
    /// 0 for the primary pronunciation, `n` for `WORD(n)`.
    pub variant: u32,
    pub phonemes: Vec<Phoneme>,
}

impl PhoneEntry {
    pub fn syllables(&self) -> usize {
        self.phonemes.iter().filter(|p| p.is_vowel()).count()
    }
}

/// Renders the entry back to dictionary line format.
impl fmt::Display for PhoneEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word.to_uppercase())?;
        if self.variant > 0 {
            write!(f, "({})", self.variant)?;
        }
        f.write_str(" ")?;
        for p in &self.phonemes {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

/// Whether a malformed line aborts the parse or is recorded and skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedDict {
    pub entries: Vec<PhoneEntry>,
    pub skipped: Vec<LineError>,
}

/// Parses one line. Returns `Ok(None)` for comments and blank lines.
pub fn parse_line(line_no: usize, line: &str) -> Result<Option<PhoneEntry>, LineError> {
    let err = |message: String| LineError {
        line: line_no,
        message,
    };
    // Newer releases append `# comment` to some rows.
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() || line.starts_with(";;;") {
        return Ok(None);
    }
    let mut fields = line.split_whitespace();
    let head = fields.next().unwrap_or_default();
    let (word, variant) = split_variant(head).map_err(err)?;
    let phonemes = fields
        .map(|p| p.parse::<Phoneme>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|m| err(format!("{m} in entry `{head}`")))?;
    if phonemes.is_empty() {
        return Err(err(format!("entry `{head}` has no phonemes")));
    }
    Ok(Some(PhoneEntry {
        word,
        variant,
        phonemes,
    }))
}

fn split_variant(head: &str) -> Result<(String, u32), String> {
    let (word, variant) = match head.strip_suffix(')').and_then(|h| h.rsplit_once('(')) {
        Some((w, n)) => (
            w,
            n.parse::<u32>()
                .map_err(|_| format!("bad variant marker in `{head}`"))?,
        ),
        None => (head, 0),
    };
    if word.is_empty() || word.chars().any(|c| c.is_control() || c == '(' || c == ')') {
        return Err(format!("bad headword `{head}`"));
    }
    Ok((word.to_lowercase(), variant))
}

/// Parses a whole dictionary stream, preserving input order.
pub fn parse_pronouncing_dict<R: BufRead>(
    reader: R,
    mode: ParseMode,
) -> Result<ParsedDict, LexiconError> {
    let mut parsed = ParsedDict::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        match parse_line(i + 1, &line) {
            Ok(Some(entry)) => parsed.entries.push(entry),
            Ok(None) => {}
            Err(e) if mode == ParseMode::Lenient => parsed.skipped.push(e),
            Err(e) => return Err(LexiconError::Parse(e)),
        }
    }
    Ok(parsed)
}

/// The rhyming part of a pronunciation: the last primary-stressed vowel
/// (else the last secondary-stressed vowel, else the last vowel) through the
/// end of the word.
pub fn rhyme_tail(entry: &PhoneEntry) -> Result<&[Phoneme], LexiconError> {
    let last_with = |pred: &dyn Fn(&Phoneme) -> bool| {
        entry
            .phonemes
            .iter()
            .rposition(|p| p.is_vowel() && pred(p))
    };
    let start = last_with(&|p| p.stress == Some(Stress::Primary))
        .or_else(|| last_with(&|p| p.stress == Some(Stress::Secondary)))
        .or_else(|| last_with(&|_| true))
        .ok_or_else(|| LexiconError::NoRhymeTail(entry.word.clone()))?;
    Ok(&entry.phonemes[start..])
}

/// Lookup structure over parsed entries. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct DictIndex {
    words: BTreeMap<String, Vec<PhoneEntry>>,
    by_tail: BTreeMap<Vec<Phoneme>, BTreeSet<String>>,
    all_variants: bool,
}

impl DictIndex {
    /// Builds an index where only variant 0 takes part in rhyme matching.
    pub fn new(entries: impl IntoIterator<Item = PhoneEntry>) -> Self {
        Self::build(entries, false)
    }

    /// Builds an index where every pronunciation variant takes part in
    /// rhyme matching.
    pub fn with_all_variants(entries: impl IntoIterator<Item = PhoneEntry>) -> Self {
        Self::build(entries, true)
    }

    fn build(entries: impl IntoIterator<Item = PhoneEntry>, all_variants: bool) -> Self {
        let mut words: BTreeMap<String, Vec<PhoneEntry>> = BTreeMap::new();
        for e in entries {
            words.entry(e.word.clone()).or_default().push(e);
        }
        for v in words.values_mut() {
            v.sort_by_key(|e| e.variant);
        }
        let mut idx = DictIndex {
            words,
            by_tail: BTreeMap::new(),
            all_variants,
        };
        let mut by_tail: BTreeMap<Vec<Phoneme>, BTreeSet<String>> = BTreeMap::new();
        for (word, entries) in &idx.words {
            for e in idx.rhyming_entries(entries) {
                if let Ok(tail) = rhyme_tail(e) {
                    by_tail.entry(tail.to_vec()).or_default().insert(word.clone());
                }
            }
        }
        idx.by_tail = by_tail;
        idx
    }

    fn rhyming_entries<'a>(&self, entries: &'a [PhoneEntry]) -> &'a [PhoneEntry] {
        if self.all_variants {
            entries
        } else {
            &entries[..entries.len().min(1)]
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains_key(word)
    }

    /// The primary pronunciation of `word`.
    pub fn primary(&self, word: &str) -> Option<&PhoneEntry> {
        self.words.get(word).and_then(|v| v.first())
    }

    pub fn variants(&self, word: &str) -> Option<&[PhoneEntry]> {
        self.words.get(word).map(Vec::as_slice)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.keys().map(String::as_str)
    }

    /// Words that rhyme with `word`, excluding `word` itself and anything in
    /// `exclusions`. Ranked by closeness in syllable count, then
    /// alphabetically.
    pub fn find_rhymes(
        &self,
        word: &str,
        exclusions: &HashSet<String>,
    ) -> Result<Vec<String>, LexiconError> {
        let entries = self
            .words
            .get(word)
            .ok_or_else(|| LexiconError::UnknownWord(word.to_string()))?;
        let syllables = entries[0].syllables();
        let mut found: BTreeSet<&str> = BTreeSet::new();
        for e in self.rhyming_entries(entries) {
            let Ok(tail) = rhyme_tail(e) else { continue };
            if let Some(ws) = self.by_tail.get(tail) {
                found.extend(ws.iter().map(String::as_str));
            }
        }
        let mut ranked: Vec<(usize, &str)> = found
            .into_iter()
            .filter(|c| *c != word && !exclusions.contains(*c))
            .map(|c| {
                let syl = self.words[c][0].syllables();
                (syl.abs_diff(syllables), c)
            })
            .collect();
        ranked.sort();
        Ok(ranked.into_iter().map(|(_, c)| c.to_string()).collect())
    }
}
