use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use unicode_normalization::UnicodeNormalization;

use super::{parse_list, TextError};

const DEFAULT_FOLD_TABLE: &str = include_str!("../../data/fold_table.txt");

/// Flags for [`normalize`]. Every combination is idempotent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NormalizationConfig {
    pub strip_html: bool,
    pub fold_accents: bool,
    pub unicode_nfc: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self {
            strip_html: true,
            fold_accents: true,
            unicode_nfc: true,
        }
    }
}

impl NormalizationConfig {
    pub const NONE: Self = Self {
        strip_html: false,
        fold_accents: false,
        unicode_nfc: false,
    };
}

/// Set of combining marks removed by accent folding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldTable {
    marks: BTreeSet<char>,
}

impl FoldTable {
    /// Parses the fold table format: one codepoint per line, written either
    /// as `U+XXXX` or as the literal character. Anything after the first
    /// whitespace is ignored.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut marks = BTreeSet::new();
        for (line, entry) in parse_list(text) {
            let token = entry.split_whitespace().next().unwrap_or(entry);
            let c = parse_codepoint(token).ok_or_else(|| format!("line {line}: cannot parse codepoint {token:?}"))?;
            marks.insert(c);
        }
        Ok(Self { marks })
    }

    pub fn load(path: &Path) -> Result<Self, TextError> {
        let text = std::fs::read_to_string(path).map_err(|e| TextError::io(path, e))?;
        Self::parse(&text).map_err(|message| TextError::Data {
            path: path.to_path_buf(),
            line: 0,
            message,
        })
    }

    pub fn marks(&self) -> impl Iterator<Item = char> + '_ {
        self.marks.iter().copied()
    }

    fn contains(&self, c: char) -> bool {
        self.marks.contains(&c)
    }

    fn fold_into(&self, text: &str, out: &mut String) {
        let mut decomposed = String::new();
        for c in text.chars() {
            if c.is_ascii() {
                out.push(c);
                continue;
            }
            if self.contains(c) {
                continue;
            }
            decomposed.clear();
            decomposed.extend(std::iter::once(c).nfd());
            if decomposed.chars().any(|d| self.contains(d)) {
                let kept: String = decomposed.chars().filter(|d| !self.contains(*d)).collect();
                out.extend(kept.nfc());
            } else {
                out.push(c);
            }
        }
    }
}

impl Default for FoldTable {
    fn default() -> Self {
        static TABLE: OnceLock<FoldTable> = OnceLock::new();
        TABLE
            .get_or_init(|| FoldTable::parse(DEFAULT_FOLD_TABLE).expect("bundled fold table"))
            .clone()
    }
}

pub(crate) fn parse_codepoint(token: &str) -> Option<char> {
    let hex = token
        .strip_prefix("U+")
        .or_else(|| token.strip_prefix("u+"))
        .or_else(|| token.strip_prefix("0x"));
    match hex {
        Some(h) => u32::from_str_radix(h, 16).ok().and_then(char::from_u32),
        None => {
            let mut it = token.chars();
            let c = it.next()?;
            it.next().is_none().then_some(c)
        }
    }
}

fn tag_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?s)<!--.*?-->|</?[A-Za-z][^<>]*>").unwrap())
}

/// A normalization pipeline bound to a fold table.
#[derive(Debug, Clone)]
pub struct Normalizer {
    cfg: NormalizationConfig,
    folds: FoldTable,
}

impl Normalizer {
    pub fn new(cfg: NormalizationConfig, folds: FoldTable) -> Self {
        Self { cfg, folds }
    }

    pub fn config(&self) -> NormalizationConfig {
        self.cfg
    }

    fn pass(&self, text: &str) -> String {
        let mut cur = text.to_string();
        if self.cfg.strip_html {
            cur = tag_regex().replace_all(&cur, "").into_owned();
        }
        if self.cfg.fold_accents {
            let mut out = String::with_capacity(cur.len());
            self.folds.fold_into(&cur, &mut out);
            cur = out;
        }
        if self.cfg.unicode_nfc {
            cur = cur.nfc().collect();
        }
        cur
    }

    /// Runs the pipeline to a fixpoint. Removing a tag or a mark can expose
    /// a new tag or a new composable pair, so a single pass is not enough
    /// for idempotence.
    pub fn normalize(&self, text: &str) -> String {
        let mut cur = self.pass(text);
        loop {
            let next = self.pass(&cur);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
}

impl Default for Normalizer {
    fn default() -> Self {
        Self::new(NormalizationConfig::default(), FoldTable::default())
    }
}

/// Normalizes `text` with the bundled fold table.
pub fn normalize(text: &str, cfg: NormalizationConfig) -> String {
    Normalizer::new(cfg, FoldTable::default()).normalize(text)
}

/// Like [`normalize`] but decodes raw bytes first.
pub fn normalize_bytes(raw: &[u8], cfg: NormalizationConfig) -> Result<String, TextError> {
    let text = std::str::from_utf8(raw).map_err(|e| TextError::Decode {
        offset: e.valid_up_to(),
    })?;
    Ok(normalize(text, cfg))
}
