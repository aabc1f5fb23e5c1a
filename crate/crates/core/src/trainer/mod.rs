//! Unigram language-model tokenizer training: frequent-substring seeding,
//! EM re-estimation of piece log-probabilities, and likelihood-driven
//! pruning down to the requested vocabulary size.

mod corpus;
mod em;
mod prune;
mod seed;

pub use corpus::TrainingCorpus;
pub use em::{corpus_log_likelihood, em_round, expected_counts};
pub use prune::{prune, removal_losses};
pub use seed::seed_candidates;

use serde::{Deserialize, Serialize};

use crate::tokenizer::{ModelError, ModelMeta, TokenizerModel, DEFAULT_MARKER};

/// Control pieces installed at ids 0, 1, 2.
pub const CONTROL_PIECES: [&str; 3] = ["<unk>", "<s>", "</s>"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    /// Number of normal pieces in the trained model. Control and byte
    /// entries come on top.
    pub target_vocab_size: usize,
    /// Number of multi-character seed candidates.
    pub seed_vocab_size: usize,
    pub max_piece_len: usize,
    pub em_iterations: usize,
    pub prune_fraction_per_round: f64,
    pub required_char_coverage: f64,
    /// Substrings seen fewer times are not seeded.
    pub min_seed_frequency: u64,
    pub rng_seed: u64,
    /// Words per E-step shard.
    pub shard_size: usize,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            target_vocab_size: 8000,
            seed_vocab_size: 64_000,
            max_piece_len: 16,
            em_iterations: 2,
            prune_fraction_per_round: 0.25,
            required_char_coverage: 0.9995,
            min_seed_frequency: 2,
            rng_seed: 0,
            shard_size: 2048,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: String| Err(TrainError::Config(m));
        if self.target_vocab_size == 0 {
            return bad("target_vocab_size must be positive".into());
        }
        if self.seed_vocab_size < self.target_vocab_size {
            return bad(format!(
                "seed_vocab_size {} is smaller than target_vocab_size {}",
                self.seed_vocab_size, self.target_vocab_size
            ));
        }
        if self.max_piece_len == 0 {
            return bad("max_piece_len must be at least 1".into());
        }
        if !(self.prune_fraction_per_round > 0.0 && self.prune_fraction_per_round < 1.0) {
            return bad("prune_fraction_per_round must lie in (0, 1)".into());
        }
        if !(self.required_char_coverage > 0.0 && self.required_char_coverage <= 1.0) {
            return bad("required_char_coverage must lie in (0, 1]".into());
        }
        if self.shard_size == 0 {
            return bad("shard_size must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("invalid trainer config: {0}")]
    Config(String),
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error(
        "cannot prune to {target} pieces: {} single characters are required for coverage ({})",
        blockers.len(),
        blockers.iter().take(20).collect::<String>()
    )]
    Unreachable { target: usize, blockers: Vec<char> },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub piece: String,
    /// Seed frequency, then expected count after each E-step.
    pub freq: f64,
    /// Log-probability.
    pub score: f64,
    /// Single characters that must survive pruning.
    pub required: bool,
}

impl Candidate {
    pub fn char_len(&self) -> usize {
        self.piece.chars().count()
    }
}

/// Piece → (frequency, log-probability), sorted by piece.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTable {
    entries: Vec<Candidate>,
    /// Log-probability charged for a character that no piece covers.
    pub fallback_logp: f64,
}

impl CandidateTable {
    pub fn new(mut entries: Vec<Candidate>, fallback_logp: f64) -> Self {
        entries.sort_by(|a, b| a.piece.cmp(&b.piece));
        entries.dedup_by(|a, b| a.piece == b.piece);
        Self { entries, fallback_logp }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Candidate> {
        self.entries.iter()
    }

    pub fn get(&self, piece: &str) -> Option<&Candidate> {
        self.entries
            .binary_search_by(|c| c.piece.as_str().cmp(piece))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn contains(&self, piece: &str) -> bool {
        self.get(piece).is_some()
    }

    /// Σ exp(score). At most 1 after an M-step.
    pub fn probability_mass(&self) -> f64 {
        self.entries.iter().map(|c| c.score.exp()).sum()
    }

    pub(crate) fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Candidate] {
        &mut self.entries
    }

    pub(crate) fn retain(&mut self, keep: impl FnMut(&Candidate) -> bool) {
        self.entries.retain(keep);
    }
}

/// Trains a unigram model: seed, then alternate EM and pruning until the
/// table reaches the target size, then a final EM pass.
pub fn train(corpus: &TrainingCorpus, cfg: &TrainerConfig) -> Result<TokenizerModel, TrainError> {
    train_with_marker(corpus, cfg, DEFAULT_MARKER)
}

pub fn train_with_marker(
    corpus: &TrainingCorpus,
    cfg: &TrainerConfig,
    marker: char,
) -> Result<TokenizerModel, TrainError> {
    cfg.validate()?;
    let mut table = seed_candidates(corpus, cfg)?;
    loop {
        for _ in 0..cfg.em_iterations {
            table = em_round(corpus, &table, cfg.shard_size);
        }
        if table.len() <= cfg.target_vocab_size {
            break;
        }
        table = prune(corpus, &table, cfg)?;
    }
    table = em_round(corpus, &table, cfg.shard_size);

    let mut pieces: Vec<&Candidate> = table.iter().filter(|c| c.score.is_finite()).collect();
    pieces.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.piece.cmp(&b.piece)));
    let model = TokenizerModel::from_pieces(
        &CONTROL_PIECES,
        pieces.iter().map(|c| (c.piece.as_str(), c.score)),
        marker,
    )?;
    let meta = ModelMeta {
        name: String::new(),
        languages: Vec::new(),
        normalization: "none".into(),
        provenance: Some(serde_json::json!({ "trainer": cfg })),
    };
    Ok(model.with_meta(meta))
}
