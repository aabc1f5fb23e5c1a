use serde::{Deserialize, Serialize};

use super::{MetricsError, RulePack};
use crate::text::{is_punctuation, split_words};

/// Byte ranges of sentences. A sentence ends after a run of `.`, `!`, `?`
/// or `…` that is followed by whitespace or the end of text, or at a line
/// break.
pub fn split_sentences(text: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut it = text.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        let end = i + c.len_utf8();
        let boundary = match c {
            '\n' => true,
            '.' | '!' | '?' | '…' => it.peek().is_none_or(|(_, n)| n.is_whitespace()),
            _ => false,
        };
        if boundary {
            if !text[start..end].trim().is_empty() {
                out.push((start, end));
            }
            start = end;
        }
    }
    if !text[start..].trim().is_empty() {
        out.push((start, text.len()));
    }
    out
}

const QUOTES: [(char, char); 6] = [('«', '»'), ('“', '”'), ('„', '“'), ('„', '”'), ('"', '"'), ('‘', '’')];

/// Byte ranges strictly inside paired quotation marks.
fn quoted_spans(text: &str, max_chars: usize) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let close = QUOTES.iter().filter(|(o, _)| *o == c).find_map(|(_, close)| {
            chars[i + 1..]
                .iter()
                .take(max_chars + 1)
                .position(|(_, x)| x == close)
                .map(|k| i + 1 + k)
        });
        match close {
            Some(j) => {
                out.push((pos + c.len_utf8(), chars[j].0));
                i = j + 1;
            }
            None => i += 1,
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "rule", rename_all = "snake_case")]
pub enum Verdict {
    /// No foreign characters.
    Native,
    /// Foreign characters legitimized by the named rule.
    Whitelisted(String),
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordVerdict {
    pub word: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CswrReport {
    pub language: String,
    pub ratio: f64,
    pub violations: u64,
    pub total_words: u64,
    pub verdicts: Vec<WordVerdict>,
}

fn is_foreign_char(pack: &RulePack, c: char) -> bool {
    !(pack.alphabet.contains(c) || c.is_numeric() || is_punctuation(c) || c.is_whitespace())
}

/// Share of words that contain foreign characters no rule accounts for.
/// A sentence with no letter of the target alphabet counts every one of
/// its words once it holds any such word.
pub fn cswr(text: &str, pack: &RulePack) -> Result<CswrReport, MetricsError> {
    let quoted = quoted_spans(text, pack.max_quote_chars);
    let mut verdicts = Vec::new();
    for (s, e) in split_sentences(text) {
        let sentence = &text[s..e];
        let words = split_words(sentence);
        let texts: Vec<&str> = words.texts().collect();
        let mut entity: Vec<Option<&str>> = vec![None; texts.len()];
        for r in pack.recognizers() {
            for (a, b) in r.spans(&texts) {
                for slot in &mut entity[a..b.min(texts.len())] {
                    slot.get_or_insert(r.name());
                }
            }
        }
        let mut local: Vec<WordVerdict> = words
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let verdict = if !w.text.chars().any(|c| is_foreign_char(pack, c)) {
                    Verdict::Native
                } else if let Some(rule) = pack.rule_for(w.text) {
                    Verdict::Whitelisted(rule.to_string())
                } else if quoted.iter().any(|&(qa, qb)| qa <= s + w.span.0 && s + w.span.1 <= qb) {
                    Verdict::Whitelisted("quote".to_string())
                } else if let Some(name) = entity[k] {
                    Verdict::Whitelisted(name.to_string())
                } else {
                    Verdict::Violation
                };
                WordVerdict {
                    word: w.text.to_string(),
                    verdict,
                }
            })
            .collect();
        let has_target = sentence.chars().any(|c| pack.alphabet.contains(c));
        if !has_target && local.iter().any(|v| v.verdict == Verdict::Violation) {
            for v in &mut local {
                v.verdict = Verdict::Violation;
            }
        }
        verdicts.extend(local);
    }
    if verdicts.is_empty() {
        return Err(MetricsError::EmptyText);
    }
    let violations = verdicts.iter().filter(|v| v.verdict == Verdict::Violation).count() as u64;
    let total_words = verdicts.len() as u64;
    Ok(CswrReport {
        language: pack.language.clone(),
        ratio: violations as f64 / total_words as f64,
        violations,
        total_words,
        verdicts,
    })
}
