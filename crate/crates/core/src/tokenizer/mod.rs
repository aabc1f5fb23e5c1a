//! Unigram tokenizer models: vocabulary, maximum-score segmentation with
//! UTF-8 byte fallback, and the TFV1 text format.

mod model;
mod segment;
mod tfv1;
pub(crate) mod trie;

pub use model::{
    byte_piece, classify_token, parse_byte_piece, ModelMeta, TokenClass, TokenEntry, TokenKind, TokenizerModel,
    DEFAULT_MARKER,
};
pub use segment::{Token, TokenSequence, UNK_PENALTY};
pub use tfv1::meta_path;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("line {line}: id {found} out of order, expected {expected}")]
    NonDenseId { line: usize, expected: usize, found: u64 },
    #[error("duplicate normal piece {piece:?} on lines {first} and {second}")]
    DuplicatePiece { piece: String, first: usize, second: usize },
    #[error("line {line}: byte piece {piece:?} is not of the form <0xNN>")]
    BadBytePiece { line: usize, piece: String },
    #[error("byte <0x{byte:02X}> appears on lines {first} and {second}")]
    DuplicateByte { byte: u8, first: usize, second: usize },
    #[error("missing byte fallback entries: {}", fmt_bytes(.0))]
    MissingBytes(Vec<u8>),
    #[error("line {line}: score {score} is not finite")]
    NonFiniteScore { line: usize, score: f64 },
    #[error("line {line}: empty normal piece")]
    EmptyPiece { line: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header declares {declared} entries but file has {actual}")]
    CountMismatch { declared: usize, actual: usize },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

fn fmt_bytes(bytes: &[u8]) -> String {
    let shown: Vec<String> = bytes.iter().take(8).map(|b| format!("<0x{b:02X}>")).collect();
    if bytes.len() > 8 {
        format!("{} and {} more", shown.join(" "), bytes.len() - 8)
    } else {
        shown.join(" ")
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DetokenizeError {
    #[error("token id {id} out of range for vocabulary of {vocab_size}")]
    IdOutOfRange { id: u32, vocab_size: usize },
    #[error("byte fallback run does not decode as UTF-8")]
    InvalidUtf8,
}
