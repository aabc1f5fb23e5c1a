use rayon::prelude::*;

use super::{CandidateTable, TrainingCorpus};
use crate::tokenizer::trie::Trie;

/// Lowest log-probability a piece can take. Keeps every score finite
/// without adding measurable mass.
pub(crate) const SCORE_FLOOR: f64 = -700.0;

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Edge {
    pub from: usize,
    pub to: usize,
    /// Index into the table, `None` for byte fallback.
    pub piece: Option<usize>,
    pub logp: f64,
}

/// Precomputed lookup structures for one table.
pub(crate) struct Lattice<'t> {
    trie: Trie,
    table: &'t CandidateTable,
    single: std::collections::HashSet<char>,
}

impl<'t> Lattice<'t> {
    pub fn new(table: &'t CandidateTable) -> Self {
        let mut trie = Trie::new();
        let mut single = std::collections::HashSet::new();
        for (i, c) in table.entries().iter().enumerate() {
            trie.insert(&c.piece, i as u32);
            let mut it = c.piece.chars();
            if let (Some(ch), None) = (it.next(), it.next()) {
                single.insert(ch);
            }
        }
        Self { trie, table, single }
    }

    /// All edges of the word's segmentation lattice. `skip` removes one
    /// piece from consideration.
    pub fn edges(&self, word: &[char], skip: Option<usize>, out: &mut Vec<Edge>) {
        out.clear();
        let entries = self.table.entries();
        for i in 0..word.len() {
            self.trie.common_prefixes(word[i..].iter().copied(), |len, idx| {
                let idx = idx as usize;
                if Some(idx) != skip {
                    out.push(Edge {
                        from: i,
                        to: i + len,
                        piece: Some(idx),
                        logp: entries[idx].score,
                    });
                }
            });
            if !self.single.contains(&word[i]) {
                out.push(Edge {
                    from: i,
                    to: i + 1,
                    piece: None,
                    logp: self.table.fallback_logp,
                });
            }
        }
    }
}

/// log Σ over all segmentations of Π p(piece). Edges must be sorted by
/// `from`, as produced by [`Lattice::edges`].
pub(crate) fn log_partition(n: usize, edges: &[Edge], alpha: &mut Vec<f64>) -> f64 {
    alpha.clear();
    alpha.resize(n + 1, f64::NEG_INFINITY);
    alpha[0] = 0.0;
    for e in edges {
        let v = alpha[e.from] + e.logp;
        alpha[e.to] = log_add(alpha[e.to], v);
    }
    alpha[n]
}

fn accumulate(n: usize, edges: &[Edge], weight: f64, counts: &mut [f64]) -> f64 {
    let mut alpha = Vec::new();
    let z = log_partition(n, edges, &mut alpha);
    if z == f64::NEG_INFINITY {
        return z;
    }
    let mut beta = vec![f64::NEG_INFINITY; n + 1];
    beta[n] = 0.0;
    for e in edges.iter().rev() {
        beta[e.from] = log_add(beta[e.from], e.logp + beta[e.to]);
    }
    for e in edges {
        if let Some(idx) = e.piece {
            let post = (alpha[e.from] + e.logp + beta[e.to] - z).exp();
            counts[idx] += weight * post;
        }
    }
    z
}

/// Expected piece counts under the current table (E-step) and the corpus
/// log-likelihood. Counts are aligned with the table's iteration order.
/// Shards are reduced in corpus order so the result does not depend on the
/// thread count.
pub fn expected_counts(corpus: &TrainingCorpus, table: &CandidateTable, shard_size: usize) -> (Vec<f64>, f64) {
    let lattice = Lattice::new(table);
    let partials: Vec<(Vec<f64>, f64)> = corpus
        .words()
        .par_chunks(shard_size.max(1))
        .map(|shard| {
            let mut counts = vec![0.0; table.len()];
            let mut ll = 0.0;
            let mut edges = Vec::new();
            for (w, c) in shard {
                lattice.edges(w, None, &mut edges);
                ll += *c as f64 * accumulate(w.len(), &edges, *c as f64, &mut counts);
            }
            (counts, ll)
        })
        .collect();
    let mut counts = vec![0.0; table.len()];
    let mut ll = 0.0;
    for (part, l) in partials {
        for (a, b) in counts.iter_mut().zip(part) {
            *a += b;
        }
        ll += l;
    }
    (counts, ll)
}

pub fn corpus_log_likelihood(corpus: &TrainingCorpus, table: &CandidateTable) -> f64 {
    let lattice = Lattice::new(table);
    let lls: Vec<f64> = corpus
        .words()
        .par_chunks(2048)
        .map(|shard| {
            let mut edges = Vec::new();
            let mut alpha = Vec::new();
            shard
                .iter()
                .map(|(w, c)| {
                    lattice.edges(w, None, &mut edges);
                    *c as f64 * log_partition(w.len(), &edges, &mut alpha)
                })
                .sum::<f64>()
        })
        .collect();
    lls.into_iter().sum()
}

/// One EM iteration: expected counts, then maximum-likelihood scores.
pub fn em_round(corpus: &TrainingCorpus, table: &CandidateTable, shard_size: usize) -> CandidateTable {
    let (counts, _) = expected_counts(corpus, table, shard_size);
    let total: f64 = counts.iter().sum();
    let mut next = table.clone();
    for (c, n) in next.entries_mut().iter_mut().zip(&counts) {
        c.freq = *n;
        c.score = if total > 0.0 && *n > 0.0 {
            (n / total).ln().max(SCORE_FLOOR)
        } else {
            SCORE_FLOOR
        };
    }
    next
}
