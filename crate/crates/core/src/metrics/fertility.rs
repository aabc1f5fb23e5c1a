use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::MetricsError;
use crate::text::split_words;
use crate::tokenizer::TokenizerModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FertilityReport {
    pub token_count: u64,
    pub word_count: u64,
    pub fertility: f64,
    /// SHA-256 of the documents joined by newlines.
    pub corpus_id: String,
    /// Fingerprint of the tokenizer.
    pub tokenizer: String,
}

/// Tokens per word over a corpus of documents. Each document is tokenized
/// as a whole; words are counted with [`split_words`].
pub fn fertility<S: AsRef<str> + Sync>(model: &TokenizerModel, docs: &[S]) -> Result<FertilityReport, MetricsError> {
    let (token_count, word_count) = docs
        .par_iter()
        .map(|d| {
            let d = d.as_ref();
            (model.tokenize(d).len() as u64, split_words(d).len() as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if word_count == 0 {
        return Err(MetricsError::EmptyCorpus);
    }
    let mut h = Sha256::new();
    for (i, d) in docs.iter().enumerate() {
        if i > 0 {
            h.update(b"\n");
        }
        h.update(d.as_ref().as_bytes());
    }
    Ok(FertilityReport {
        token_count,
        word_count,
        fertility: token_count as f64 / word_count as f64,
        corpus_id: hex::encode(h.finalize()),
        tokenizer: model.fingerprint(),
    })
}
