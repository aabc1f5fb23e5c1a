use std::collections::HashSet;

use rayon::prelude::*;

use super::em::{log_partition, Edge, Lattice};
use super::{CandidateTable, TrainError, TrainerConfig, TrainingCorpus};

/// Exact drop in corpus log-likelihood from deleting each piece on its own,
/// scores of the remaining pieces left as they are. Required pieces get
/// `+inf`.
pub fn removal_losses(corpus: &TrainingCorpus, table: &CandidateTable, shard_size: usize) -> Vec<f64> {
    let lattice = Lattice::new(table);
    let entries = table.entries();
    let partials: Vec<Vec<f64>> = corpus
        .words()
        .par_chunks(shard_size.max(1))
        .map(|shard| {
            let mut loss = vec![0.0; entries.len()];
            let mut edges = Vec::new();
            let mut kept: Vec<Edge> = Vec::new();
            let mut alpha = Vec::new();
            let mut seen = HashSet::new();
            for (w, c) in shard {
                lattice.edges(w, None, &mut edges);
                let z = log_partition(w.len(), &edges, &mut alpha);
                seen.clear();
                for e in &edges {
                    let Some(idx) = e.piece else { continue };
                    if entries[idx].required || !seen.insert(idx) {
                        continue;
                    }
                    kept.clear();
                    kept.extend(edges.iter().filter(|x| x.piece != Some(idx)).copied());
                    let z_without = log_partition(w.len(), &kept, &mut alpha);
                    loss[idx] += *c as f64 * (z - z_without);
                }
            }
            loss
        })
        .collect();
    let mut loss: Vec<f64> = entries
        .iter()
        .map(|c| if c.required { f64::INFINITY } else { 0.0 })
        .collect();
    for part in partials {
        for (a, b) in loss.iter_mut().zip(part) {
            *a += b;
        }
    }
    loss
}

/// Removes the `prune_fraction_per_round` share of removable pieces whose
/// deletion costs the least likelihood, never going below
/// `target_vocab_size` and never touching required single characters.
pub fn prune(
    corpus: &TrainingCorpus,
    table: &CandidateTable,
    cfg: &TrainerConfig,
) -> Result<CandidateTable, TrainError> {
    let excess = table.len().saturating_sub(cfg.target_vocab_size);
    if excess == 0 {
        return Ok(table.clone());
    }
    let removable = table.iter().filter(|c| !c.required).count();
    if removable < excess {
        return Err(TrainError::Unreachable {
            target: cfg.target_vocab_size,
            blockers: table
                .iter()
                .filter(|c| c.required)
                .filter_map(|c| c.piece.chars().next())
                .collect(),
        });
    }
    let per_round = ((removable as f64 * cfg.prune_fraction_per_round).ceil() as usize).max(1);
    let k = per_round.min(excess);

    let loss = removal_losses(corpus, table, cfg.shard_size);
    let entries = table.entries();
    let mut order: Vec<usize> = (0..entries.len()).filter(|&i| !entries[i].required).collect();
    order.sort_by(|&a, &b| {
        loss[a]
            .total_cmp(&loss[b])
            .then(entries[a].score.total_cmp(&entries[b].score))
            .then_with(|| entries[a].piece.cmp(&entries[b].piece))
    });
    let drop: HashSet<&str> = order[..k].iter().map(|&i| entries[i].piece.as_str()).collect();
    let mut next = table.clone();
    next.retain(|c| !drop.contains(c.piece.as_str()));
    Ok(next)
}
