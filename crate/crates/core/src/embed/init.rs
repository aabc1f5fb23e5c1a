use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EmbedError, EmbeddingMatrix};
use crate::merge::MergePlan;
use crate::tokenizer::{TokenKind, TokenizerModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Random,
    MeanAll,
    /// Mean of the rows of the base tokens a new piece splits into.
    Nachos,
}

impl std::str::FromStr for InitKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(InitKind::Random),
            "mean_all" | "mean" => Ok(InitKind::MeanAll),
            "nachos" => Ok(InitKind::Nachos),
            _ => Err(format!("unknown init strategy {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitStrategy {
    pub kind: InitKind,
    pub rng_seed: u64,
    /// Standard deviation for `Random`. Defaults to that of the existing rows.
    pub random_scale: Option<f32>,
}

impl Default for InitStrategy {
    fn default() -> Self {
        Self {
            kind: InitKind::Nachos,
            rng_seed: 0,
            random_scale: None,
        }
    }
}

/// Mean of every row whose id is not in `exclude`, accumulated in f64.
pub fn mean_rows(m: &EmbeddingMatrix, exclude: &BTreeSet<u32>) -> Vec<f64> {
    let mut sum = vec![0.0f64; m.dims()];
    let mut n = 0usize;
    for (i, row) in m.iter_rows().enumerate() {
        if exclude.contains(&(i as u32)) {
            continue;
        }
        for (s, v) in sum.iter_mut().zip(row) {
            *s += *v as f64;
        }
        n += 1;
    }
    if n > 0 {
        for s in &mut sum {
            *s /= n as f64;
        }
    }
    sum
}

fn std_of_rows(m: &EmbeddingMatrix, exclude: &BTreeSet<u32>) -> f64 {
    let mean = mean_rows(m, exclude);
    let mut ss = 0.0;
    let mut n = 0usize;
    for (i, row) in m.iter_rows().enumerate() {
        if exclude.contains(&(i as u32)) {
            continue;
        }
        for (v, mu) in row.iter().zip(&mean) {
            ss += (*v as f64 - mu).powi(2);
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        (ss / n as f64).sqrt()
    }
}

/// Mean of the base rows a piece segments into under `base`. `None` when
/// the segmentation is empty.
pub fn nachos_row(e_o: &EmbeddingMatrix, base: &TokenizerModel, piece: &str) -> Option<Vec<f32>> {
    let ids = base.segment_piece(piece).ids();
    if ids.is_empty() {
        return None;
    }
    let mut sum = vec![0.0f64; e_o.dims()];
    for id in &ids {
        for (s, v) in sum.iter_mut().zip(e_o.row(*id as usize)) {
            *s += *v as f64;
        }
    }
    Some(sum.iter().map(|s| (s / ids.len() as f64) as f32).collect())
}

/// Builds the embedding matrix of the merged model. Rows of retained ids
/// are copied from `e_o`; rows of added ids follow `strat`; unused slots
/// are zero.
pub fn init_new_embeddings(
    e_o: &EmbeddingMatrix,
    base: &TokenizerModel,
    plan: &MergePlan,
    strat: &InitStrategy,
) -> Result<EmbeddingMatrix, EmbedError> {
    if e_o.rows() != base.vocab_size() {
        return Err(EmbedError::RowCount {
            rows: e_o.rows(),
            vocab_size: base.vocab_size(),
        });
    }
    if plan.resulting_model.vocab_size() != base.vocab_size() {
        return Err(EmbedError::RowCount {
            rows: e_o.rows(),
            vocab_size: plan.resulting_model.vocab_size(),
        });
    }
    let added = plan.added_ids();
    let mut out = e_o.clone();

    let rows: Vec<(u32, Vec<f32>)> = match strat.kind {
        InitKind::Nachos => plan
            .added
            .par_iter()
            .map(|s| {
                nachos_row(e_o, base, &s.piece)
                    .map(|r| (s.id, r))
                    .ok_or_else(|| EmbedError::EmptySegmentation {
                        id: s.id,
                        piece: s.piece.clone(),
                    })
            })
            .collect::<Result<_, _>>()?,
        InitKind::MeanAll => {
            let mean: Vec<f32> = mean_rows(e_o, &added).iter().map(|v| *v as f32).collect();
            plan.added.iter().map(|s| (s.id, mean.clone())).collect()
        }
        InitKind::Random => {
            let scale = match strat.random_scale {
                Some(s) => s as f64,
                None => std_of_rows(e_o, &added),
            };
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(EmbedError::Scale(scale as f32));
            }
            let normal = Normal::new(0.0, scale).expect("scale checked above");
            let mut rng = ChaCha8Rng::seed_from_u64(strat.rng_seed);
            let mut ids: Vec<u32> = added.iter().copied().collect();
            ids.sort_unstable();
            ids.into_iter()
                .map(|id| {
                    let row = (0..e_o.dims()).map(|_| normal.sample(&mut rng) as f32).collect();
                    (id, row)
                })
                .collect()
        }
    };
    for (id, row) in rows {
        out.set_row(id as usize, &row)?;
    }
    let zero = vec![0.0f32; e_o.dims()];
    for e in plan.resulting_model.entries() {
        if e.kind == TokenKind::Unused {
            out.set_row(e.id as usize, &zero)?;
        }
    }
    Ok(out)
}
