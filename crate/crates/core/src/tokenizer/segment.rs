use super::model::{TokenKind, TokenizerModel};
use super::DetokenizeError;
use crate::text::TextError;

/// Byte fallback costs `min_score - UNK_PENALTY` per character.
pub const UNK_PENALTY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub id: u32,
    /// Byte span in the source text. Spans tile the source exactly; the
    /// implicit leading marker covers zero bytes.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TokenSequence {
    pub tokens: Vec<Token>,
    /// Sum of the scores of the chosen pieces; fallback characters count
    /// `unk_penalty` each.
    pub score: f64,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.tokens.iter().map(|t| t.id).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Unit {
    c: char,
    start: usize,
    end: usize,
    /// Literal marker characters in the input: never matched by pieces so
    /// they survive a round trip as bytes.
    forced: bool,
    /// Starts a new segment.
    boundary: bool,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Piece { id: u32, len: usize },
    Fallback,
}

impl TokenizerModel {
    fn text_units(&self, text: &str) -> Vec<Unit> {
        let mut units = Vec::with_capacity(text.len() + 1);
        if self.dummy_prefix && !text.is_empty() {
            units.push(Unit {
                c: self.marker(),
                start: 0,
                end: 0,
                forced: false,
                boundary: true,
            });
        }
        for (i, c) in text.char_indices() {
            let end = i + c.len_utf8();
            units.push(match c {
                ' ' => Unit {
                    c: self.marker(),
                    start: i,
                    end,
                    forced: false,
                    boundary: true,
                },
                c if c == self.marker() => Unit {
                    c,
                    start: i,
                    end,
                    forced: true,
                    boundary: false,
                },
                c => Unit {
                    c,
                    start: i,
                    end,
                    forced: false,
                    boundary: false,
                },
            });
        }
        units
    }

    fn piece_units(&self, piece: &str) -> Vec<Unit> {
        piece
            .char_indices()
            .map(|(i, c)| Unit {
                c,
                start: i,
                end: i + c.len_utf8(),
                forced: false,
                boundary: c == self.marker(),
            })
            .collect()
    }

    /// Maximum-score segmentation of `text`. Spaces become boundary markers
    /// and, when the model carries the bare marker piece, a marker is
    /// prepended. Characters that no piece covers are emitted as their UTF-8
    /// bytes. Equal-score alternatives resolve to the one with longer
    /// leftmost pieces.
    pub fn tokenize(&self, text: &str) -> TokenSequence {
        let units = self.text_units(text);
        self.run(text.as_bytes(), &units)
    }

    pub fn tokenize_bytes(&self, raw: &[u8]) -> Result<TokenSequence, TextError> {
        let text = std::str::from_utf8(raw).map_err(|e| TextError::Decode {
            offset: e.valid_up_to(),
        })?;
        Ok(self.tokenize(text))
    }

    pub fn encode(&self, text: &str) -> Vec<u32> {
        self.tokenize(text).ids()
    }

    /// Segments a string that is already in piece form: marker characters
    /// are boundaries, no prefix is added and spaces are ordinary text.
    pub fn segment_piece(&self, piece: &str) -> TokenSequence {
        let units = self.piece_units(piece);
        self.run(piece.as_bytes(), &units)
    }

    fn run(&self, src: &[u8], units: &[Unit]) -> TokenSequence {
        let mut out = TokenSequence::default();
        let mut start = 0;
        for i in 1..=units.len() {
            if i == units.len() || units[i].boundary {
                self.viterbi(src, &units[start..i], start == 0, &mut out);
                start = i;
            }
        }
        out
    }

    fn viterbi(&self, src: &[u8], seg: &[Unit], first: bool, out: &mut TokenSequence) {
        let n = seg.len();
        if n == 0 {
            return;
        }
        let mut best = vec![f64::NEG_INFINITY; n + 1];
        let mut step = vec![Step::Fallback; n];
        best[n] = 0.0;
        let mut matches: Vec<(usize, u32)> = Vec::new();
        for i in (0..n).rev() {
            matches.clear();
            let chars = seg[i..].iter().take_while(|u| !u.forced).map(|u| u.c);
            self.trie.common_prefixes(chars, |len, id| matches.push((len, id)));
            // longest first so that strict improvement keeps the longest on ties
            for &(len, id) in matches.iter().rev() {
                let s = self.entries()[id as usize].score + best[i + len];
                if s > best[i] {
                    best[i] = s;
                    step[i] = Step::Piece { id, len };
                }
            }
            let is_dummy = first && i == 0 && seg[0].start == seg[0].end && seg[0].boundary;
            if !is_dummy {
                let s = self.unk_penalty + best[i + 1];
                if s > best[i] {
                    best[i] = s;
                    step[i] = Step::Fallback;
                }
            }
        }
        out.score += best[0];
        let mut i = 0;
        while i < n {
            match step[i] {
                Step::Piece { id, len } => {
                    out.tokens.push(super::Token {
                        id,
                        span: (seg[i].start, seg[i + len - 1].end),
                    });
                    i += len;
                }
                Step::Fallback => {
                    let u = seg[i];
                    for (k, b) in src[u.start..u.end].iter().enumerate() {
                        out.tokens.push(super::Token {
                            id: self.byte_id(*b),
                            span: (u.start + k, u.start + k + 1),
                        });
                    }
                    i += 1;
                }
            }
        }
    }

    fn detok_bytes(&self, ids: &[u32]) -> Result<Vec<u8>, DetokenizeError> {
        let mut buf = Vec::new();
        let mut tmp = [0u8; 4];
        for &id in ids {
            let e = self.entry(id).ok_or(DetokenizeError::IdOutOfRange {
                id,
                vocab_size: self.vocab_size(),
            })?;
            match e.kind {
                TokenKind::Normal => {
                    for c in e.piece.chars() {
                        if c == self.marker() {
                            buf.push(b' ');
                        } else {
                            buf.extend_from_slice(c.encode_utf8(&mut tmp).as_bytes());
                        }
                    }
                }
                TokenKind::Byte => buf.push(super::parse_byte_piece(&e.piece).expect("validated")),
                TokenKind::Control | TokenKind::Unused => {}
            }
        }
        if self.dummy_prefix && buf.first() == Some(&b' ') {
            buf.remove(0);
        }
        Ok(buf)
    }

    /// Inverse of [`tokenize`](Self::tokenize).
    pub fn detokenize(&self, ids: &[u32]) -> Result<String, DetokenizeError> {
        String::from_utf8(self.detok_bytes(ids)?).map_err(|_| DetokenizeError::InvalidUtf8)
    }

    /// Like [`detokenize`](Self::detokenize) but replaces invalid byte runs
    /// with U+FFFD. The flag reports whether any replacement happened.
    pub fn detokenize_lossy(&self, ids: &[u32]) -> Result<(String, bool), DetokenizeError> {
        let bytes = self.detok_bytes(ids)?;
        match String::from_utf8(bytes) {
            Ok(s) => Ok((s, false)),
            Err(e) => Ok((String::from_utf8_lossy(e.as_bytes()).into_owned(), true)),
        }
    }
}
