use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::trie::Trie;
use super::ModelError;

/// SentencePiece's word-boundary marker, U+2581.
pub const DEFAULT_MARKER: char = '\u{2581}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Normal,
    Byte,
    Control,
    Unused,
}

impl TokenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Normal => "normal",
            TokenKind::Byte => "byte",
            TokenKind::Control => "control",
            TokenKind::Unused => "unused",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TokenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "normal" => TokenKind::Normal,
            "byte" => TokenKind::Byte,
            "control" => TokenKind::Control,
            "unused" => TokenKind::Unused,
            other => return Err(format!("unknown token kind {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenEntry {
    pub id: u32,
    pub piece: String,
    pub score: f64,
    pub kind: TokenKind,
}

impl TokenEntry {
    pub fn new(id: u32, piece: impl Into<String>, score: f64, kind: TokenKind) -> Self {
        Self {
            id,
            piece: piece.into(),
            score,
            kind,
        }
    }

    pub fn normal(id: u32, piece: impl Into<String>, score: f64) -> Self {
        Self::new(id, piece, score, TokenKind::Normal)
    }

    pub fn byte(id: u32, b: u8) -> Self {
        Self::new(id, byte_piece(b), 0.0, TokenKind::Byte)
    }
}

pub fn byte_piece(b: u8) -> String {
    format!("<0x{b:02X}>")
}

pub fn parse_byte_piece(piece: &str) -> Option<u8> {
    let hex = piece.strip_prefix("<0x")?.strip_suffix('>')?;
    if hex.len() != 2 {
        return None;
    }
    u8::from_str_radix(hex, 16).ok()
}

/// Coarse class of a vocabulary entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenClass {
    English,
    Byte,
    Control,
    Other,
}

/// A normal piece is English when every character other than the boundary
/// marker is ASCII.
pub fn classify_token(entry: &TokenEntry, marker: char) -> TokenClass {
    match entry.kind {
        TokenKind::Byte => TokenClass::Byte,
        TokenKind::Control => TokenClass::Control,
        TokenKind::Unused => TokenClass::Other,
        TokenKind::Normal => {
            if entry.piece.chars().all(|c| c == marker || c.is_ascii()) {
                TokenClass::English
            } else {
                TokenClass::Other
            }
        }
    }
}

/// Descriptive metadata kept next to a model. It is not part of the TFV1
/// format; the CLI stores it in a `.meta.json` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub name: String,
    #[serde(default)]
    pub languages: Vec<String>,
    /// Text normalization applied before segmentation.
    #[serde(default = "default_normalization")]
    pub normalization: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

fn default_normalization() -> String {
    "none".to_string()
}

impl Default for ModelMeta {
    fn default() -> Self {
        Self {
            name: String::new(),
            languages: Vec::new(),
            normalization: default_normalization(),
            provenance: None,
        }
    }
}

/// An immutable, validated unigram model.
#[derive(Clone)]
pub struct TokenizerModel {
    entries: Vec<TokenEntry>,
    marker: char,
    pub meta: ModelMeta,
    pub(super) trie: Trie,
    pub(super) byte_ids: [u32; 256],
    piece_ids: HashMap<String, u32>,
    pub(super) unk_penalty: f64,
    pub(super) dummy_prefix: bool,
}

impl fmt::Debug for TokenizerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TokenizerModel")
            .field("vocab_size", &self.entries.len())
            .field("marker", &self.marker)
            .field("meta", &self.meta)
            .finish()
    }
}

impl PartialEq for TokenizerModel {
    fn eq(&self, other: &Self) -> bool {
        self.marker == other.marker && self.entries == other.entries
    }
}

impl TokenizerModel {
    /// Validates `entries` (which must be in id order) and builds the
    /// segmentation index. Errors name TFV1 line numbers, i.e. entry index
    /// plus two.
    pub fn new(entries: Vec<TokenEntry>, marker: char) -> Result<Self, ModelError> {
        let lines: Vec<usize> = (0..entries.len()).map(|i| i + 2).collect();
        Self::with_lines(entries, marker, &lines)
    }

    pub(super) fn with_lines(entries: Vec<TokenEntry>, marker: char, lines: &[usize]) -> Result<Self, ModelError> {
        let mut trie = Trie::new();
        let mut piece_ids: HashMap<String, u32> = HashMap::new();
        let mut byte_ids = [u32::MAX; 256];
        let mut min_score = f64::INFINITY;
        for (idx, e) in entries.iter().enumerate() {
            let line = lines[idx];
            if e.id as usize != idx {
                return Err(ModelError::NonDenseId {
                    line,
                    expected: idx,
                    found: e.id as u64,
                });
            }
            if !e.score.is_finite() {
                return Err(ModelError::NonFiniteScore { line, score: e.score });
            }
            match e.kind {
                TokenKind::Normal => {
                    if e.piece.is_empty() {
                        return Err(ModelError::EmptyPiece { line });
                    }
                    if let Some(&prev) = piece_ids.get(&e.piece) {
                        return Err(ModelError::DuplicatePiece {
                            piece: e.piece.clone(),
                            first: lines[prev as usize],
                            second: line,
                        });
                    }
                    piece_ids.insert(e.piece.clone(), e.id);
                    trie.insert(&e.piece, e.id);
                    min_score = min_score.min(e.score);
                }
                TokenKind::Byte => {
                    let b = parse_byte_piece(&e.piece).ok_or_else(|| ModelError::BadBytePiece {
                        line,
                        piece: e.piece.clone(),
                    })?;
                    if byte_ids[b as usize] != u32::MAX {
                        return Err(ModelError::DuplicateByte {
                            byte: b,
                            first: lines[byte_ids[b as usize] as usize],
                            second: line,
                        });
                    }
                    byte_ids[b as usize] = e.id;
                }
                TokenKind::Control | TokenKind::Unused => {}
            }
        }
        let missing: Vec<u8> = (0..=255u8).filter(|b| byte_ids[*b as usize] == u32::MAX).collect();
        if !missing.is_empty() {
            return Err(ModelError::MissingBytes(missing));
        }
        let unk_penalty = if min_score.is_finite() {
            min_score - super::UNK_PENALTY
        } else {
            -super::UNK_PENALTY
        };
        let dummy_prefix = piece_ids.contains_key(marker.encode_utf8(&mut [0; 4]) as &str);
        Ok(Self {
            entries,
            marker,
            meta: ModelMeta::default(),
            trie,
            byte_ids,
            piece_ids,
            unk_penalty,
            dummy_prefix,
        })
    }

    pub fn with_meta(mut self, meta: ModelMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn entries(&self) -> &[TokenEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<TokenEntry> {
        self.entries
    }

    pub fn entry(&self, id: u32) -> Option<&TokenEntry> {
        self.entries.get(id as usize)
    }

    pub fn vocab_size(&self) -> usize {
        self.entries.len()
    }

    pub fn marker(&self) -> char {
        self.marker
    }

    /// Id of a normal piece.
    pub fn piece_id(&self, piece: &str) -> Option<u32> {
        self.piece_ids.get(piece).copied()
    }

    pub fn byte_id(&self, b: u8) -> u32 {
        self.byte_ids[b as usize]
    }

    /// Score charged for each character emitted through byte fallback.
    pub fn unk_penalty(&self) -> f64 {
        self.unk_penalty
    }

    /// Whether segmentation prepends a boundary marker to the text. This is
    /// on exactly when the bare marker is itself a normal piece, which
    /// guarantees the prefix is always emitted as part of a piece.
    pub fn uses_dummy_prefix(&self) -> bool {
        self.dummy_prefix
    }

    pub fn classify(&self, entry: &TokenEntry) -> TokenClass {
        classify_token(entry, self.marker)
    }

    /// Hex SHA-256 of the TFV1 serialization.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.to_tfv1().as_bytes()))
    }

    /// Builds a model from (piece, score) normal pieces, adding the given
    /// control pieces first and the 256 byte pieces after them.
    pub fn from_pieces<'a>(
        controls: &[&str],
        pieces: impl IntoIterator<Item = (&'a str, f64)>,
        marker: char,
    ) -> Result<Self, ModelError> {
        let mut entries = Vec::new();
        for c in controls {
            entries.push(TokenEntry::new(entries.len() as u32, *c, 0.0, TokenKind::Control));
        }
        for b in 0..=255u8 {
            entries.push(TokenEntry::byte(entries.len() as u32, b));
        }
        for (p, s) in pieces {
            entries.push(TokenEntry::normal(entries.len() as u32, p, s));
        }
        Self::new(entries, marker)
    }
}
