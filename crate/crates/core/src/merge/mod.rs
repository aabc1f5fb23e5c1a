//! Combines a base tokenizer with a target-language tokenizer into a
//! bilingual one of the same size.
//!
//! English (ASCII-only) pieces and service entries of the base keep their
//! ids and scores. Pieces the two models share keep the base id but take the
//! target score. Remaining base pieces are evicted, least useful first, and
//! their ids go to the best-scoring target pieces the base lacks.

mod audit;
mod category;
mod invariance;

pub use audit::{AuditRecord, Disposition, MergeSummary};
pub use category::{emit_category_map, Category, CategoryMap, CategoryMapError};
pub use invariance::{verify_english_invariance, InvarianceReport};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::tokenizer::{ModelError, TokenClass, TokenEntry, TokenKind, TokenizerModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapScope {
    /// Only non-English shared pieces take target scores. English
    /// tokenization is then provably unchanged.
    NonAsciiOnly,
    /// Every shared piece takes its target score.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvictionOrder {
    AscendingScore,
    LongestFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeConfig {
    pub overlap_scope: OverlapScope,
    pub eviction_order: EvictionOrder,
    /// Cap on added pieces; `None` fills every evictable slot.
    pub max_new_tokens: Option<usize>,
    /// When set, the base vocabulary must have exactly this size.
    pub expected_vocab_size: Option<usize>,
}

impl Default for MergeConfig {
    fn default() -> Self {
        Self {
            overlap_scope: OverlapScope::NonAsciiOnly,
            eviction_order: EvictionOrder::AscendingScore,
            max_new_tokens: None,
            expected_vocab_size: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub id: u32,
    pub piece: String,
    pub score: f64,
}

/// Where a piece in a merge came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Base { id: u32 },
    Target { id: u32 },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Base { id } => write!(f, "base id {id}"),
            Provenance::Target { id } => write!(f, "target id {id}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MergeError {
    #[error("base vocabulary has {actual} entries, expected {expected}")]
    VocabSizeMismatch { expected: usize, actual: usize },
    #[error("boundary markers differ: base U+{base:04X}, target U+{target:04X}")]
    MarkerMismatch { base: u32, target: u32 },
    #[error("piece {piece:?} from {first} collides with {second}")]
    Collision {
        piece: String,
        first: Provenance,
        second: Provenance,
    },
    #[error("audit line {line}: {message}")]
    Audit { line: usize, message: String },
    #[error("line {line} contains non-ASCII text")]
    NonAscii { line: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreStats {
    pub base_mean: f64,
    pub target_mean: f64,
}

/// Token-by-token record of a merge.
#[derive(Debug, Clone)]
pub struct MergePlan {
    pub kept_english: BTreeSet<u32>,
    /// Byte, control and unused entries.
    pub kept_service: BTreeSet<u32>,
    /// Non-English base pieces that were evictable but not needed.
    pub kept_other: BTreeSet<u32>,
    /// id → (base score, target score)
    pub overlapped: BTreeMap<u32, (f64, f64)>,
    /// In eviction order. `evicted[i].id == added[i].id`.
    pub evicted: Vec<Slot>,
    pub added: Vec<Slot>,
    pub scores: ScoreStats,
    pub resulting_model: TokenizerModel,
}

impl MergePlan {
    pub fn added_ids(&self) -> BTreeSet<u32> {
        self.added.iter().map(|s| s.id).collect()
    }
}

fn mean_normal_score(m: &TokenizerModel) -> f64 {
    let (sum, n) = m
        .entries()
        .iter()
        .filter(|e| e.kind == TokenKind::Normal)
        .fold((0.0, 0usize), |(s, n), e| (s + e.score, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn merge(base: &TokenizerModel, target: &TokenizerModel, cfg: &MergeConfig) -> Result<MergePlan, MergeError> {
    if let Some(expected) = cfg.expected_vocab_size {
        if expected != base.vocab_size() {
            return Err(MergeError::VocabSizeMismatch {
                expected,
                actual: base.vocab_size(),
            });
        }
    }
    if base.marker() != target.marker() {
        return Err(MergeError::MarkerMismatch {
            base: base.marker() as u32,
            target: target.marker() as u32,
        });
    }
    let restrict = cfg.overlap_scope == OverlapScope::NonAsciiOnly;

    let mut kept_english = BTreeSet::new();
    let mut kept_service = BTreeSet::new();
    let mut overlapped = BTreeMap::new();
    let mut evictable: Vec<&TokenEntry> = Vec::new();
    for e in base.entries() {
        if e.kind != TokenKind::Normal {
            kept_service.insert(e.id);
            continue;
        }
        let english = base.classify(e) == TokenClass::English;
        let shared = target.piece_id(&e.piece).map(|id| target.entries()[id as usize].score);
        match shared {
            Some(_) if english && restrict => {
                kept_english.insert(e.id);
            }
            Some(score) => {
                overlapped.insert(e.id, (e.score, score));
            }
            None if english => {
                kept_english.insert(e.id);
            }
            None => evictable.push(e),
        }
    }

    let mut candidates: Vec<&TokenEntry> = target
        .entries()
        .iter()
        .filter(|e| e.kind == TokenKind::Normal)
        .filter(|e| base.piece_id(&e.piece).is_none())
        .filter(|e| !(restrict && target.classify(e) == TokenClass::English))
        .collect();
    candidates.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.piece.cmp(&b.piece)));
    if let Some(cap) = cfg.max_new_tokens {
        candidates.truncate(cap);
    }

    match cfg.eviction_order {
        EvictionOrder::AscendingScore => {
            evictable.sort_by(|a, b| a.score.total_cmp(&b.score).then_with(|| a.piece.cmp(&b.piece)))
        }
        EvictionOrder::LongestFirst => evictable.sort_by(|a, b| {
            b.piece
                .chars()
                .count()
                .cmp(&a.piece.chars().count())
                .then(a.score.total_cmp(&b.score))
                .then_with(|| a.piece.cmp(&b.piece))
        }),
    }
    let n = candidates.len().min(evictable.len());
    let kept_other: BTreeSet<u32> = evictable[n..].iter().map(|e| e.id).collect();
    let evicted: Vec<Slot> = evictable[..n]
        .iter()
        .map(|e| Slot {
            id: e.id,
            piece: e.piece.clone(),
            score: e.score,
        })
        .collect();
    let added: Vec<Slot> = evicted
        .iter()
        .zip(&candidates[..n])
        .map(|(slot, c)| Slot {
            id: slot.id,
            piece: c.piece.clone(),
            score: c.score,
        })
        .collect();

    let mut entries = base.entries().to_vec();
    for (id, (_, score)) in &overlapped {
        entries[*id as usize].score = *score;
    }
    let mut origin: BTreeMap<u32, Provenance> = BTreeMap::new();
    for (slot, c) in added.iter().zip(&candidates[..n]) {
        entries[slot.id as usize] = TokenEntry::normal(slot.id, slot.piece.clone(), slot.score);
        origin.insert(slot.id, Provenance::Target { id: c.id });
    }
    let resulting_model = TokenizerModel::new(entries, base.marker()).map_err(|e| match e {
        ModelError::DuplicatePiece { piece, first, second } => {
            let prov = |line: usize| {
                let id = (line - 2) as u32;
                origin.get(&id).cloned().unwrap_or(Provenance::Base { id })
            };
            MergeError::Collision {
                piece,
                first: prov(first),
                second: prov(second),
            }
        }
        other => MergeError::Model(other),
    })?;
    let mut meta = base.meta.clone();
    for l in &target.meta.languages {
        if !meta.languages.contains(l) {
            meta.languages.push(l.clone());
        }
    }
    meta.provenance = Some(serde_json::json!({
        "merge": cfg,
        "base": base.fingerprint(),
        "target": target.fingerprint(),
    }));
    let resulting_model = resulting_model.with_meta(meta);

    Ok(MergePlan {
        kept_english,
        kept_service,
        kept_other,
        overlapped,
        evicted,
        added,
        scores: ScoreStats {
            base_mean: mean_normal_score(base),
            target_mean: mean_normal_score(target),
        },
        resulting_model,
    })
}
