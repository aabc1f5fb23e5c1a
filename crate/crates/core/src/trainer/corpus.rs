use std::collections::HashMap;

/// Word frequencies of a training corpus, in piece form (each word carries
/// its leading boundary marker). Words are kept sorted so that shards and
/// reductions do not depend on hash order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingCorpus {
    words: Vec<(Vec<char>, u64)>,
}

impl TrainingCorpus {
    /// Splits each line on spaces, the same boundaries the tokenizer uses,
    /// and prefixes every word with `marker`.
    pub fn from_lines<I, S>(lines: I, marker: char) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut buf = String::new();
        for line in lines {
            for w in line.as_ref().split(' ').filter(|w| !w.is_empty()) {
                buf.clear();
                buf.push(marker);
                buf.push_str(w);
                match counts.get_mut(buf.as_str()) {
                    Some(c) => *c += 1,
                    None => {
                        counts.insert(buf.clone(), 1);
                    }
                }
            }
        }
        Self::from_counts(counts)
    }

    /// Takes words verbatim, no marker is added.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut merged: HashMap<String, u64> = HashMap::new();
        for (w, c) in counts {
            if c > 0 && !w.as_ref().is_empty() {
                *merged.entry(w.as_ref().to_string()).or_default() += c;
            }
        }
        let mut words: Vec<(String, u64)> = merged.into_iter().collect();
        words.sort_unstable();
        Self {
            words: words.into_iter().map(|(w, c)| (w.chars().collect(), c)).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Number of distinct words.
    pub fn unique_words(&self) -> usize {
        self.words.len()
    }

    /// Total word occurrences.
    pub fn total_words(&self) -> u64 {
        self.words.iter().map(|(_, c)| c).sum()
    }

    pub(crate) fn words(&self) -> &[(Vec<char>, u64)] {
        &self.words
    }
}
