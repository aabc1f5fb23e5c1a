#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every segmentation of `word` into pieces of `vocab`, as index lists.
/// Characters with no single-character piece may be consumed by a fallback
/// step, reported as `None`.
pub fn enumerate_segmentations(word: &[char], vocab: &[String]) -> Vec<Vec<Option<usize>>> {
    let singles: Vec<char> = vocab
        .iter()
        .filter(|p| p.chars().count() == 1)
        .map(|p| p.chars().next().unwrap())
        .collect();
    let pieces: Vec<Vec<char>> = vocab.iter().map(|p| p.chars().collect()).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(
        rest: &[char],
        pieces: &[Vec<char>],
        singles: &[char],
        cur: &mut Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for (i, p) in pieces.iter().enumerate() {
            if rest.starts_with(p) {
                cur.push(Some(i));
                go(&rest[p.len()..], pieces, singles, cur, out);
                cur.pop();
            }
        }
        if !singles.contains(&rest[0]) {
            cur.push(None);
            go(&rest[1..], pieces, singles, cur, out);
            cur.pop();
        }
    }
    go(word, &pieces, &singles, &mut cur, &mut out);
    out
}

/// Brute-force marginal log-likelihood of a word-count corpus.
pub fn brute_log_likelihood(words: &[(&str, u64)], vocab: &[(String, f64)], fallback_logp: f64) -> f64 {
    let names: Vec<String> = vocab.iter().map(|(p, _)| p.clone()).collect();
    words
        .iter()
        .map(|(w, c)| {
            let chars: Vec<char> = w.chars().collect();
            let z: f64 = enumerate_segmentations(&chars, &names)
                .iter()
                .map(|seg| {
                    seg.iter()
                        .map(|s| s.map_or(fallback_logp, |i| vocab[i].1))
                        .sum::<f64>()
                        .exp()
                })
                .sum();
            *c as f64 * z.ln()
        })
        .sum()
}

/// 20 eight-letter words over the Ukrainian lowercase alphabet.
pub fn closed_lexicon(seed: u64) -> Vec<String> {
    let alphabet: Vec<char> = "абвгґдеєжзиіїйклмнопрстуфхцчшщьюя".chars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = Vec::new();
    while words.len() < 20 {
        let w: String = (0..8).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        if !words.contains(&w) {
            words.push(w);
        }
    }
    words
}

/// Each lexicon word `repeats` times, shuffled into lines of ten words.
pub fn lexicon_corpus(lexicon: &[String], repeats: usize, seed: u64) -> Vec<String> {
    let mut tokens: Vec<&str> = lexicon
        .iter()
        .flat_map(|w| std::iter::repeat_n(w.as_str(), repeats))
        .collect();
    tokens.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    tokens.chunks(10).map(|c| c.join(" ")).collect()
}

/// Loads a `word<TAB>weight` frequency list.
pub fn load_freq(path: &str) -> Vec<(String, f64)> {
    let full = format!("{}/tests/data/freq/{path}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&full)
        .unwrap_or_else(|e| panic!("{full}: {e}"))
        .lines()
        .filter_map(|l| {
            let (w, f) = l.split_once('\t')?;
            Some((w.to_string(), f.parse().ok()?))
        })
        .collect()
}

/// Draws `n_words` words by frequency, emitted as lines of `per_line` words.
pub fn sample_corpus(freq: &[(String, f64)], n_words: usize, per_line: usize, seed: u64) -> Vec<String> {
    use rand_distr::{Distribution, WeightedAliasIndex};
    let dist = WeightedAliasIndex::new(freq.iter().map(|(_, f)| *f).collect()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines = Vec::with_capacity(n_words / per_line + 1);
    let mut line = String::new();
    for i in 0..n_words {
        if !line.is_empty() {
            line.push(' ');
        }
        line.push_str(&freq[dist.sample(&mut rng)].0);
        if (i + 1) % per_line == 0 {
            lines.push(std::mem::take(&mut line));
        }
    }
    if !line.is_empty() {
        lines.push(line);
    }
    lines
}

/// Independent count of substrings (char length 2..=max_len) weighted by
/// frequency times length, highest first.
pub fn ranked_substrings(words: &HashMap<String, u64>, max_len: usize) -> Vec<(String, u64)> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for (w, c) in words {
        let chars: Vec<char> = w.chars().collect();
        for i in 0..chars.len() {
            for j in i + 2..=(i + max_len).min(chars.len()) {
                *counts.entry(chars[i..j].iter().collect()).or_default() += c;
            }
        }
    }
    let mut v: Vec<(String, u64)> = counts
        .into_iter()
        .map(|(s, c)| {
            let l = s.chars().count() as u64;
            (s, c * l)
        })
        .collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

/// Best total score over every segmentation of `text` into vocabulary
/// pieces, where any single character may instead cost `unk`. Exhaustive
/// recursion over first steps; `memo` caches results per suffix so many
/// strings can share the work.
pub fn brute_best_score(
    text: &[char],
    vocab: &[(Vec<char>, f64)],
    unk: f64,
    memo: &mut HashMap<Vec<char>, f64>,
) -> f64 {
    if text.is_empty() {
        return 0.0;
    }
    if let Some(v) = memo.get(text) {
        return *v;
    }
    let mut best = unk + brute_best_score(&text[1..], vocab, unk, memo);
    for (p, s) in vocab {
        if text.starts_with(p) {
            best = best.max(s + brute_best_score(&text[p.len()..], vocab, unk, memo));
        }
    }
    memo.insert(text.to_vec(), best);
    best
}

/// Random vocabulary of pieces over `alphabet`, 1 to 3 characters long.
pub fn toy_vocab(alphabet: &[char], n: usize, seed: u64) -> Vec<(String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(String, f64)> = Vec::new();
    while out.len() < n {
        let len = rng.gen_range(1..=3);
        let p: String = (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        if !out.iter().any(|(q, _)| *q == p) {
            // quarter-step scores make exact ties common
            let s = -(rng.gen_range(1..=24) as f64) / 4.0;
            out.push((p, s));
        }
    }
    out
}

/// All strings over `alphabet` of length 0..=max_len.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<Vec<char>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for c in alphabet {
                let mut t: Vec<char> = s.clone();
                t.push(*c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
