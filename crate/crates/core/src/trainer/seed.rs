use std::collections::{HashMap, HashSet};

use super::{Candidate, CandidateTable, TrainError, TrainerConfig, TrainingCorpus};

/// Characters covering at least `coverage` of all character occurrences,
/// most frequent first.
pub(crate) fn required_chars(corpus: &TrainingCorpus, coverage: f64) -> Vec<(char, u64)> {
    let mut counts: HashMap<char, u64> = HashMap::new();
    for (w, c) in corpus.words() {
        for ch in w {
            *counts.entry(*ch).or_default() += c;
        }
    }
    let total: u64 = counts.values().sum();
    let mut chars: Vec<(char, u64)> = counts.into_iter().collect();
    chars.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut covered = 0u64;
    let mut out = Vec::new();
    for (ch, n) in chars {
        if covered as f64 >= coverage * total as f64 {
            break;
        }
        covered += n;
        out.push((ch, n));
    }
    out
}

/// Seeds the candidate table with every required single character plus the
/// `seed_vocab_size` best multi-character substrings, ranked by
/// frequency × length. Substrings containing a character outside the
/// required set are skipped; those characters go to byte fallback.
pub fn seed_candidates(corpus: &TrainingCorpus, cfg: &TrainerConfig) -> Result<CandidateTable, TrainError> {
    if corpus.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let singles = required_chars(corpus, cfg.required_char_coverage);
    let allowed: HashSet<char> = singles.iter().map(|(c, _)| *c).collect();

    let mut subs: HashMap<String, u64> = HashMap::new();
    let mut buf = String::new();
    for (w, count) in corpus.words() {
        for start in 0..w.len() {
            buf.clear();
            for (k, ch) in w[start..].iter().take(cfg.max_piece_len).enumerate() {
                if !allowed.contains(ch) {
                    break;
                }
                buf.push(*ch);
                if k == 0 {
                    continue;
                }
                match subs.get_mut(buf.as_str()) {
                    Some(n) => *n += count,
                    None => {
                        subs.insert(buf.clone(), *count);
                    }
                }
            }
        }
    }
    let mut ranked: Vec<(String, u64, usize)> = subs
        .into_iter()
        .filter(|(_, n)| *n >= cfg.min_seed_frequency)
        .map(|(s, n)| {
            let len = s.chars().count();
            (s, n, len)
        })
        .collect();
    ranked.sort_by(|a, b| (b.1 * b.2 as u64).cmp(&(a.1 * a.2 as u64)).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(cfg.seed_vocab_size);

    let mut entries: Vec<Candidate> = singles
        .iter()
        .map(|(c, n)| Candidate {
            piece: c.to_string(),
            freq: *n as f64,
            score: 0.0,
            required: true,
        })
        .collect();
    entries.extend(ranked.into_iter().map(|(s, n, _)| Candidate {
        piece: s,
        freq: n as f64,
        score: 0.0,
        required: false,
    }));
    let total: f64 = entries.iter().map(|c| c.freq).sum();
    for c in &mut entries {
        c.score = (c.freq / total).ln();
    }
    let total_chars: u64 = corpus.words().iter().map(|(w, c)| w.len() as u64 * c).sum();
    let fallback_logp = (1.0 / total_chars as f64).ln() - 10.0;
    Ok(CandidateTable::new(entries, fallback_logp))
}
