//! Bilingual tokenizer construction and evaluation.
//!
//! The pipeline trains a unigram tokenizer for a target language, merges it
//! into a base tokenizer without disturbing English tokenization,
//! initializes embeddings for the tokens it added, and measures the result.

pub mod embed;
pub mod merge;
pub mod metrics;
pub mod text;
pub mod tokenizer;
pub mod trainer;

use std::path::PathBuf;

/// Directory holding bundled data (rule packs, affix lists, fold table):
/// `BIVOCAB_DATA_DIR` when set, otherwise the `data` directory of this
/// crate.
pub fn data_dir() -> PathBuf {
    std::env::var_os("BIVOCAB_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")))
}
