use std::io::BufRead;

use super::TextError;

/// Iterator over the lines of a UTF-8 stream. Decode errors carry the byte
/// offset from the start of the stream. Line terminators (`\n`, `\r\n`) are
/// removed.
pub struct LineReader<R> {
    inner: R,
    offset: usize,
    buf: Vec<u8>,
}

impl<R: BufRead> LineReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            offset: 0,
            buf: Vec::new(),
        }
    }
}

impl<R: BufRead> Iterator for LineReader<R> {
    type Item = Result<String, TextError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.buf.clear();
        let n = match self.inner.read_until(b'\n', &mut self.buf) {
            Ok(0) => return None,
            Ok(n) => n,
            Err(e) => {
                return Some(Err(TextError::Io {
                    path: "<stream>".into(),
                    source: e,
                }))
            }
        };
        let start = self.offset;
        self.offset += n;
        let mut line = &self.buf[..];
        if let Some(l) = line.strip_suffix(b"\n") {
            line = l;
        }
        if let Some(l) = line.strip_suffix(b"\r") {
            line = l;
        }
        Some(
            std::str::from_utf8(line)
                .map(str::to_string)
                .map_err(|e| TextError::Decode {
                    offset: start + e.valid_up_to(),
                }),
        )
    }
}

pub fn read_lines<R: BufRead>(reader: R) -> LineReader<R> {
    LineReader::new(reader)
}
