use serde::{Deserialize, Serialize};

use std::collections::{BTreeMap, BTreeSet};

use super::{MergeError, MergePlan, ScoreStats, Slot};
use crate::tokenizer::{TokenEntry, TokenKind, TokenizerModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    KeptEnglish,
    KeptService,
    KeptOther,
    Overlapped,
    Replaced,
}

/// One line of the JSONL merge audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub id: u32,
    pub disposition: Disposition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub old_piece: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_piece: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub old_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeSummary {
    pub vocab_size: usize,
    pub kept_english: usize,
    pub kept_service: usize,
    pub kept_other: usize,
    pub overlapped: usize,
    pub added: usize,
    pub scores: ScoreStats,
}

impl MergePlan {
    /// Audit records in id order, one per vocabulary entry.
    pub fn audit(&self) -> Vec<AuditRecord> {
        let added: std::collections::HashMap<u32, (&str, &str, f64, f64)> = self
            .evicted
            .iter()
            .zip(&self.added)
            .map(|(old, new)| (old.id, (old.piece.as_str(), new.piece.as_str(), old.score, new.score)))
            .collect();
        self.resulting_model
            .entries()
            .iter()
            .map(|e| {
                let mut r = AuditRecord {
                    id: e.id,
                    disposition: Disposition::KeptOther,
                    old_piece: Some(e.piece.clone()),
                    new_piece: None,
                    old_score: Some(e.score),
                    new_score: None,
                };
                if let Some((old_p, new_p, old_s, new_s)) = added.get(&e.id) {
                    r.disposition = Disposition::Replaced;
                    r.old_piece = Some(old_p.to_string());
                    r.new_piece = Some(new_p.to_string());
                    r.old_score = Some(*old_s);
                    r.new_score = Some(*new_s);
                } else if let Some((old_s, new_s)) = self.overlapped.get(&e.id) {
                    r.disposition = Disposition::Overlapped;
                    r.old_score = Some(*old_s);
                    r.new_score = Some(*new_s);
                } else if self.kept_english.contains(&e.id) {
                    r.disposition = Disposition::KeptEnglish;
                } else if self.kept_service.contains(&e.id) {
                    r.disposition = Disposition::KeptService;
                }
                r
            })
            .collect()
    }

    pub fn audit_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.audit() {
            out.push_str(&serde_json::to_string(&r).expect("audit records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> MergeSummary {
        MergeSummary {
            vocab_size: self.resulting_model.vocab_size(),
            kept_english: self.kept_english.len(),
            kept_service: self.kept_service.len(),
            kept_other: self.kept_other.len(),
            overlapped: self.overlapped.len(),
            added: self.added.len(),
            scores: self.scores,
        }
    }
}

impl MergePlan {
    /// Rebuilds a plan from its JSONL audit and the base model it was made
    /// from. Evicted and added slots come back in id order. The target score
    /// mean is taken over the target scores the audit records.
    pub fn from_audit(base: &TokenizerModel, jsonl: &str) -> Result<MergePlan, MergeError> {
        let bad = |line: usize, message: String| MergeError::Audit { line, message };
        let mut kept_english = BTreeSet::new();
        let mut kept_service = BTreeSet::new();
        let mut kept_other = BTreeSet::new();
        let mut overlapped = BTreeMap::new();
        let mut evicted = Vec::new();
        let mut added = Vec::new();
        let mut entries = base.entries().to_vec();
        let mut target_scores = Vec::new();
        let mut n = 0;
        for (i, raw) in jsonl.lines().enumerate() {
            let line = i + 1;
            let r: AuditRecord = serde_json::from_str(raw).map_err(|e| bad(line, e.to_string()))?;
            if r.id as usize != i || i >= entries.len() {
                return Err(bad(line, format!("unexpected id {}", r.id)));
            }
            let old = &base.entries()[i];
            if r.old_piece.as_deref() != Some(old.piece.as_str()) {
                return Err(bad(
                    line,
                    format!("old piece does not match base piece {:?}", old.piece),
                ));
            }
            let new_score = || r.new_score.ok_or_else(|| bad(line, "missing new_score".into()));
            match r.disposition {
                Disposition::KeptEnglish => {
                    kept_english.insert(r.id);
                }
                Disposition::KeptService => {
                    kept_service.insert(r.id);
                }
                Disposition::KeptOther => {
                    kept_other.insert(r.id);
                }
                Disposition::Overlapped => {
                    let s = new_score()?;
                    overlapped.insert(r.id, (old.score, s));
                    entries[i].score = s;
                    target_scores.push(s);
                }
                Disposition::Replaced => {
                    let s = new_score()?;
                    let piece = r
                        .new_piece
                        .clone()
                        .ok_or_else(|| bad(line, "missing new_piece".into()))?;
                    if old.kind != TokenKind::Normal {
                        return Err(bad(line, "service entries cannot be replaced".into()));
                    }
                    evicted.push(Slot {
                        id: r.id,
                        piece: old.piece.clone(),
                        score: old.score,
                    });
                    added.push(Slot {
                        id: r.id,
                        piece: piece.clone(),
                        score: s,
                    });
                    entries[i] = TokenEntry::normal(r.id, piece, s);
                    target_scores.push(s);
                }
            }
            n += 1;
        }
        if n != base.vocab_size() {
            return Err(MergeError::VocabSizeMismatch {
                expected: base.vocab_size(),
                actual: n,
            });
        }
        let base_mean = super::mean_normal_score(base);
        let target_mean = if target_scores.is_empty() {
            0.0
        } else {
            target_scores.iter().sum::<f64>() / target_scores.len() as f64
        };
        let resulting_model = TokenizerModel::new(entries, base.marker())?;
        Ok(MergePlan {
            kept_english,
            kept_service,
            kept_other,
            overlapped,
            evicted,
            added,
            scores: ScoreStats { base_mean, target_mean },
            resulting_model,
        })
    }
}
