//! Text preparation shared by every other stage: normalization, word
//! segmentation and Arabic light stemming.
//!
//! All of the tokenizer metrics divide by a word count, so every module that
//! needs to know what a "word" is goes through [`split_words`].

mod lines;
mod normalize;
mod punct;
mod stem;
mod words;

pub use lines::{read_lines, LineReader};
pub use normalize::{normalize, normalize_bytes, FoldTable, NormalizationConfig, Normalizer};
pub use punct::{is_detachable, is_punctuation};
pub use stem::{light_stem, stem_text, Stem, StemmerConfig};
pub use words::{split_words, split_words_with, SplitConfig, Word, WordStream};

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("invalid UTF-8 at byte offset {offset}")]
    Decode { offset: usize },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Data {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl TextError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        TextError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Parses a one-entry-per-line data file. Blank lines and lines starting
/// with `#` are skipped. Returns `(line_number, entry)` pairs, 1-based.
pub fn parse_list(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                None
            } else {
                Some((i + 1, line))
            }
        })
        .collect()
}

/// Reads a list file from disk, see [`parse_list`].
pub fn load_list(path: &Path) -> Result<Vec<String>, TextError> {
    let raw = std::fs::read(path).map_err(|e| TextError::io(path, e))?;
    let text = std::str::from_utf8(&raw).map_err(|e| TextError::Decode {
        offset: e.valid_up_to(),
    })?;
    Ok(parse_list(text).into_iter().map(|(_, s)| s.to_string()).collect())
}
