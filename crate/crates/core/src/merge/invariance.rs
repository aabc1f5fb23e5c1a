use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MergeError;
use crate::tokenizer::TokenizerModel;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub checked: usize,
    /// 1-based line numbers whose token ids differ.
    pub mismatches: Vec<usize>,
}

impl InvarianceReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks that `merged` tokenizes every English line to the same ids as
/// `base`. Lines must be ASCII; anything else is rejected, since the
/// guarantee only covers English text.
pub fn verify_english_invariance<S: AsRef<str> + Sync>(
    base: &TokenizerModel,
    merged: &TokenizerModel,
    lines: &[S],
) -> Result<InvarianceReport, MergeError> {
    if let Some(i) = lines.iter().position(|l| !l.as_ref().is_ascii()) {
        return Err(MergeError::NonAscii { line: i + 1 });
    }
    let mismatches: Vec<usize> = lines
        .par_iter()
        .enumerate()
        .filter(|(_, l)| base.encode(l.as_ref()) != merged.encode(l.as_ref()))
        .map(|(i, _)| i + 1)
        .collect();
    Ok(InvarianceReport {
        checked: lines.len(),
        mismatches,
    })
}
