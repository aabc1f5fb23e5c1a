use std::path::Path;

use super::{load_list, parse_list, split_words, TextError};

const ARABIC_PREFIXES: &str = include_str!("../../data/arabic_prefixes.txt");
const ARABIC_SUFFIXES: &str = include_str!("../../data/arabic_suffixes.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemmerConfig {
    pub enabled: bool,
    pub prefixes: Vec<String>,
    pub suffixes: Vec<String>,
    /// Minimum stem length in characters; an affix is only removed if the
    /// remainder keeps at least this many.
    pub min_stem_len: usize,
}

impl StemmerConfig {
    /// The bundled Arabic affix lists.
    pub fn arabic() -> Self {
        let list = |s: &str| parse_list(s).into_iter().map(|(_, e)| e.to_string()).collect();
        Self {
            enabled: true,
            prefixes: list(ARABIC_PREFIXES),
            suffixes: list(ARABIC_SUFFIXES),
            min_stem_len: 2,
        }
    }

    pub fn from_files(prefixes: &Path, suffixes: &Path, min_stem_len: usize) -> Result<Self, TextError> {
        Ok(Self {
            enabled: true,
            prefixes: load_list(prefixes)?,
            suffixes: load_list(suffixes)?,
            min_stem_len,
        })
    }

    pub fn disabled() -> Self {
        Self {
            enabled: false,
            prefixes: Vec::new(),
            suffixes: Vec::new(),
            min_stem_len: 0,
        }
    }
}

/// A word split into (prefix, stem, suffix). `prefix + stem + suffix` is
/// always the original word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stem<'a> {
    pub prefix: &'a str,
    pub stem: &'a str,
    pub suffix: &'a str,
}

impl<'a> Stem<'a> {
    /// Stripped affixes in original order.
    pub fn affixes(&self) -> Vec<&'a str> {
        [self.prefix, self.suffix]
            .into_iter()
            .filter(|a| !a.is_empty())
            .collect()
    }

    pub fn is_stripped(&self) -> bool {
        !self.prefix.is_empty() || !self.suffix.is_empty()
    }
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

fn longest(candidates: &[String], fits: impl Fn(&str) -> bool) -> Option<&str> {
    candidates
        .iter()
        .filter(|a| !a.is_empty() && fits(a))
        .max_by(|a, b| char_len(a).cmp(&char_len(b)).then_with(|| b.cmp(a)))
        .map(String::as_str)
}

/// Strips at most one prefix and then at most one suffix, longest match
/// first.
pub fn light_stem<'a>(word: &'a str, cfg: &StemmerConfig) -> Stem<'a> {
    let whole = Stem {
        prefix: "",
        stem: word,
        suffix: "",
    };
    if !cfg.enabled || char_len(word) < cfg.min_stem_len {
        return whole;
    }
    let prefix = longest(&cfg.prefixes, |p| {
        word.starts_with(p) && char_len(&word[p.len()..]) >= cfg.min_stem_len
    })
    .map(|p| &word[..p.len()])
    .unwrap_or("");
    let rest = &word[prefix.len()..];
    let suffix_len = longest(&cfg.suffixes, |s| {
        rest.ends_with(s) && char_len(&rest[..rest.len() - s.len()]) >= cfg.min_stem_len
    })
    .map_or(0, str::len);
    Stem {
        prefix,
        stem: &rest[..rest.len() - suffix_len],
        suffix: &rest[rest.len() - suffix_len..],
    }
}

/// Rewrites every word of `text` so stripped affixes stand as separate
/// space-delimited words. Text outside words is copied through.
pub fn stem_text(text: &str, cfg: &StemmerConfig) -> String {
    let mut out = String::with_capacity(text.len() + text.len() / 4);
    let mut last = 0;
    for w in split_words(text).iter() {
        out.push_str(&text[last..w.span.0]);
        let s = light_stem(w.text, cfg);
        let parts = [s.prefix, s.stem, s.suffix];
        let mut first = true;
        for p in parts.into_iter().filter(|p| !p.is_empty()) {
            if !first {
                out.push(' ');
            }
            out.push_str(p);
            first = false;
        }
        last = w.span.1;
    }
    out.push_str(&text[last..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definite_article() {
        let cfg = StemmerConfig::arabic();
        let s = light_stem("الكتاب", &cfg);
        assert_eq!(s.stem, "كتاب");
        assert_eq!(s.affixes(), vec!["ال"]);
    }

    #[test]
    fn no_affix_is_identity() {
        let cfg = StemmerConfig::arabic();
        let s = light_stem("كتب", &cfg);
        assert_eq!((s.prefix, s.stem, s.suffix), ("", "كتب", ""));
        assert!(s.affixes().is_empty());
    }

    #[test]
    fn prefix_and_suffix() {
        let cfg = StemmerConfig::arabic();
        let s = light_stem("والمدرسة", &cfg);
        assert_eq!((s.prefix, s.stem, s.suffix), ("وال", "مدرس", "ة"));
    }

    #[test]
    fn short_words_pass_through() {
        let cfg = StemmerConfig::arabic();
        assert!(!light_stem("ال", &cfg).is_stripped());
        // stripping ال would leave a single character
        assert!(!light_stem("الم", &cfg).is_stripped());
    }

    #[test]
    fn disabled_passes_through() {
        let s = light_stem("الكتاب", &StemmerConfig::disabled());
        assert!(!s.is_stripped());
    }

    #[test]
    fn stem_text_separates_affixes() {
        let cfg = StemmerConfig::arabic();
        assert_eq!(stem_text("قرأت الكتاب.", &cfg), "قرأت ال كتاب.");
    }
}
