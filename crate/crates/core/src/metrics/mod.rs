//! Tokenizer and generated-text metrics: fertility, non-existing word
//! ratio, code-switching word ratio and token adoption by category.

mod adoption;
mod cswr;
mod fertility;
mod newr;
mod report;
mod rulepack;
mod wordset;

pub use crate::merge::{Category, CategoryMap};
pub use adoption::{categorize_slices, categorize_stream, AdoptionReport, AdoptionSlice};
pub use cswr::{cswr, split_sentences, CswrReport, Verdict, WordVerdict};
pub use fertility::{fertility, FertilityReport};
pub use newr::{newr, NewrConfig, NewrReport};
pub use report::Report;
pub use rulepack::{load_rulepack, Alphabet, EntityRecognizer, Gazetteer, RegexRule, RulePack, MAX_QUOTE_CHARS};
pub use wordset::{fold_word, load_wordset, WordSet};

use std::path::PathBuf;

use crate::text::TextError;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("corpus contains no words")]
    EmptyCorpus,
    #[error("text contains no countable words")]
    EmptyText,
    #[error("no rule pack for language {tag:?} under {dir}")]
    UnknownLanguage { tag: String, dir: PathBuf },
    #[error("{path}:{line}: {message}")]
    Data {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: rule {name:?}: {source}")]
    Regex {
        path: PathBuf,
        line: usize,
        name: String,
        #[source]
        source: Box<regex::Error>,
    },
    #[error("{file}: manifest declares {expected} entries, found {actual}")]
    Manifest {
        file: String,
        expected: usize,
        actual: usize,
    },
    #[error("token id {id} outside category map of size {size}")]
    IdOutOfRange { id: u32, size: usize },
    #[error("slice {slice:?} has no tokens")]
    EmptySlice { slice: String },
    #[error(transparent)]
    Text(#[from] TextError),
}
