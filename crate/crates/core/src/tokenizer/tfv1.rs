//! TFV1 model files.
//!
//! ```text
//! TFV1<TAB><vocab_size><TAB><marker codepoint, hex>
//! <id><TAB><kind><TAB><score><TAB><piece>
//! ...
//! ```
//!
//! Entries are sorted by id. Scores use the shortest decimal that parses
//! back to the same `f64`. Tab, newline and backslash in pieces are written
//! as `\t`, `\n` and `\\`. Every line, including the last, ends in `\n`.

use std::fmt::Write as _;
use std::path::Path;

use super::model::{TokenEntry, TokenKind, TokenizerModel};
use super::ModelError;

const MAGIC: &str = "TFV1";

fn escape_into(piece: &str, out: &mut String) {
    for c in piece.chars() {
        match c {
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
}

fn unescape(raw: &str, line: usize) -> Result<String, ModelError> {
    let mut out = String::with_capacity(raw.len());
    let mut it = raw.chars();
    while let Some(c) = it.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match it.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            other => {
                return Err(ModelError::Syntax {
                    line,
                    message: format!("bad escape sequence \\{}", other.map(String::from).unwrap_or_default()),
                })
            }
        }
    }
    Ok(out)
}

impl TokenizerModel {
    pub fn to_tfv1(&self) -> String {
        let mut out = String::with_capacity(self.vocab_size() * 24);
        writeln!(out, "{MAGIC}\t{}\t{:04X}", self.vocab_size(), self.marker() as u32).unwrap();
        for e in self.entries() {
            write!(out, "{}\t{}\t{}\t", e.id, e.kind, e.score).unwrap();
            escape_into(&e.piece, &mut out);
            out.push('\n');
        }
        out
    }

    pub fn from_tfv1(text: &str) -> Result<Self, ModelError> {
        let body = text.strip_suffix('\n').ok_or(ModelError::Syntax {
            line: text.split('\n').count(),
            message: "missing final newline".into(),
        })?;
        let mut lines = body.split('\n');
        let header = lines.next().unwrap_or_default();
        let fields: Vec<&str> = header.split('\t').collect();
        let syntax = |line: usize, message: String| ModelError::Syntax { line, message };
        if fields.len() != 3 || fields[0] != MAGIC {
            return Err(syntax(1, format!("expected TFV1 header, found {header:?}")));
        }
        let declared: usize = fields[1]
            .parse()
            .map_err(|_| syntax(1, format!("bad vocab size {:?}", fields[1])))?;
        let marker = u32::from_str_radix(fields[2], 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| syntax(1, format!("bad marker codepoint {:?}", fields[2])))?;

        let mut entries = Vec::with_capacity(declared);
        let mut line_nos = Vec::with_capacity(declared);
        for (i, raw) in lines.enumerate() {
            let line = i + 2;
            let mut parts = raw.splitn(4, '\t');
            let (Some(id), Some(kind), Some(score), Some(piece)) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(syntax(line, "expected 4 tab-separated fields".into()));
            };
            let id: u32 = id.parse().map_err(|_| syntax(line, format!("bad id {id:?}")))?;
            let kind: TokenKind = kind.parse().map_err(|m| syntax(line, m))?;
            let score: f64 = score
                .parse()
                .map_err(|_| syntax(line, format!("bad score {score:?}")))?;
            entries.push(TokenEntry {
                id,
                piece: unescape(piece, line)?,
                score,
                kind,
            });
            line_nos.push(line);
        }
        if entries.len() != declared {
            return Err(ModelError::CountMismatch {
                declared,
                actual: entries.len(),
            });
        }
        TokenizerModel::with_lines(entries, marker, &line_nos)
    }

    /// Writes the TFV1 file only; metadata is the caller's business.
    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        std::fs::write(path, self.to_tfv1()).map_err(|e| ModelError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Loads a TFV1 file and, if present, its `.meta.json` sidecar.
    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let io = |e: std::io::Error| ModelError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let raw = std::fs::read(path).map_err(io)?;
        let text = std::str::from_utf8(&raw).map_err(|e| ModelError::Io {
            path: path.to_path_buf(),
            message: format!("invalid UTF-8 at byte offset {}", e.valid_up_to()),
        })?;
        let mut model = Self::from_tfv1(text)?;
        let sidecar = meta_path(path);
        if sidecar.exists() {
            let meta = std::fs::read_to_string(&sidecar).map_err(io)?;
            model.meta = serde_json::from_str(&meta).map_err(|e| ModelError::Io {
                path: sidecar.clone(),
                message: e.to_string(),
            })?;
        }
        Ok(model)
    }
}

/// `model.tfv1` -> `model.tfv1.meta.json`
pub fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    name.into()
}
