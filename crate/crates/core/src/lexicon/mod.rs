//! Word material: the pronouncing dictionary, the association lexicon and the
//! cue corpus built from them.

mod assoc;
mod corpus;
mod dict;

pub use assoc::{Association, AssociationLexicon, Relation};
pub use corpus::{
    build_corpus, coverage, read_word_list, CorpusRow, CorpusTable, Coverage, CORPUS_HEADER,
    DISTRACTOR_COUNT, STUDY_LIST_LEN,
};
pub use dict::{
    parse_line, parse_pronouncing_dict, rhyme_tail, DictIndex, LineError, ParseMode, ParsedDict,
    PhoneEntry, Phoneme, Stress,
};

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("dictionary {0}")]
    Parse(#[from] LineError),
    #[error("association lexicon line {line}: {message}")]
    Association { line: usize, message: String },
    #[error("`{0}` is not in the pronouncing dictionary")]
    UnknownWord(String),
    #[error("`{0}` has no vowel, so no rhyme tail")]
    NoRhymeTail(String),
    #[error("insufficient cue coverage for: {}", .0.join("; "))]
    Coverage(Vec<String>),
    #[error("invalid corpus: {0}")]
    InvalidCorpus(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
