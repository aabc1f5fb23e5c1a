use std::ops::Range;

use super::punct::is_detachable;

/// A word and the byte span it occupies in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Word<'a> {
    pub text: &'a str,
    pub span: (usize, usize),
}

impl Word<'_> {
    pub fn range(&self) -> Range<usize> {
        self.span.0..self.span.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitConfig {
    /// Split leading and trailing sentence punctuation off each
    /// whitespace-delimited run. Runs made only of punctuation vanish.
    pub detach_punctuation: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            detach_punctuation: true,
        }
    }
}

/// Ordered, non-overlapping words of a text. Spans are strictly increasing
/// and no word is empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordStream<'a> {
    words: Vec<Word<'a>>,
}

impl<'a> WordStream<'a> {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Word<'a>> {
        self.words.iter()
    }

    pub fn as_slice(&self) -> &[Word<'a>] {
        &self.words
    }

    pub fn texts(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.words.iter().map(|w| w.text)
    }
}

impl<'a> IntoIterator for WordStream<'a> {
    type Item = Word<'a>;
    type IntoIter = std::vec::IntoIter<Word<'a>>;

    fn into_iter(self) -> Self::IntoIter {
        self.words.into_iter()
    }
}

pub fn split_words(text: &str) -> WordStream<'_> {
    split_words_with(text, &SplitConfig::default())
}

pub fn split_words_with<'a>(text: &'a str, cfg: &SplitConfig) -> WordStream<'a> {
    let mut words = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                push_run(text, s, i, cfg, &mut words);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    WordStream { words }
}

fn push_run<'a>(text: &'a str, start: usize, end: usize, cfg: &SplitConfig, out: &mut Vec<Word<'a>>) {
    let run = &text[start..end];
    let (lo, hi) = if cfg.detach_punctuation {
        let trimmed_front = run.trim_start_matches(is_detachable);
        let lo = start + (run.len() - trimmed_front.len());
        let core = trimmed_front.trim_end_matches(is_detachable);
        (lo, lo + core.len())
    } else {
        (start, end)
    };
    if hi > lo {
        out.push(Word {
            text: &text[lo..hi],
            span: (lo, hi),
        });
    }
}
