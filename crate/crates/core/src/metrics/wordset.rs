use std::collections::HashSet;
use std::path::Path;

use super::MetricsError;
use std::sync::OnceLock;

use crate::text::{load_list, FoldTable, NormalizationConfig, Normalizer};

/// Case- and accent-folded form used for every dictionary lookup.
pub fn fold_word(word: &str) -> String {
    static NORM: OnceLock<Normalizer> = OnceLock::new();
    let norm = NORM.get_or_init(|| {
        let cfg = NormalizationConfig {
            strip_html: false,
            ..NormalizationConfig::default()
        };
        Normalizer::new(cfg, FoldTable::default())
    });
    norm.normalize(&word.to_lowercase())
}

/// Reference vocabulary for the non-existing word ratio.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordSet {
    words: HashSet<String>,
    pub source: String,
}

impl WordSet {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            words: words.into_iter().map(|w| fold_word(w.as_ref())).collect(),
            source: String::new(),
        }
    }

    pub fn insert(&mut self, word: &str) -> bool {
        self.words.insert(fold_word(word))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&fold_word(word))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// One word per line; `#` comments and blank lines are skipped.
pub fn load_wordset(path: &Path) -> Result<WordSet, MetricsError> {
    let mut set = WordSet::from_words(load_list(path)?);
    set.source = path.display().to_string();
    Ok(set)
}
