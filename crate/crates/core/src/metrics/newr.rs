use serde::{Deserialize, Serialize};

use super::{Alphabet, MetricsError, WordSet};
use crate::text::split_words;

#[derive(Debug, Clone, Default)]
pub struct NewrConfig {
    /// Leave words made only of digits and punctuation out of the count.
    pub exclude_numeric: bool,
    /// When set, words with no letter of this alphabet are left out.
    pub exclude_foreign: Option<Alphabet>,
    /// When set, words found here (proper names) are left out.
    pub exclude_names: Option<WordSet>,
}

impl NewrConfig {
    pub fn standard() -> Self {
        Self {
            exclude_numeric: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewrReport {
    pub ratio: f64,
    pub missing: u64,
    pub counted: u64,
    /// Offending words in order of appearance.
    pub offending: Vec<String>,
}

/// Share of counted words that are not in `words`.
pub fn newr(text: &str, words: &WordSet, cfg: &NewrConfig) -> Result<NewrReport, MetricsError> {
    let mut counted = 0u64;
    let mut offending = Vec::new();
    for w in split_words(text) {
        let w = w.text;
        if cfg.exclude_numeric && w.chars().all(|c| !c.is_alphabetic()) {
            continue;
        }
        if let Some(a) = &cfg.exclude_foreign {
            if !w.chars().any(|c| a.contains(c)) {
                continue;
            }
        }
        if let Some(names) = &cfg.exclude_names {
            if names.contains(w) {
                continue;
            }
        }
        counted += 1;
        if !words.contains(w) {
            offending.push(w.to_string());
        }
    }
    if counted == 0 {
        return Err(MetricsError::EmptyText);
    }
    Ok(NewrReport {
        ratio: offending.len() as f64 / counted as f64,
        missing: offending.len() as u64,
        counted,
        offending,
    })
}
