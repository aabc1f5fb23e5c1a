use std::path::Path;

use super::{EmbedError, EmbeddingMatrix};

pub const EMB1_MAGIC: [u8; 8] = *b"EMB1\0\0\0\0";
const HEADER: usize = 16;

impl EmbeddingMatrix {
    pub fn to_emb1(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER + self.data.len() * 4);
        out.extend_from_slice(&EMB1_MAGIC);
        out.extend_from_slice(&(self.rows as u32).to_le_bytes());
        out.extend_from_slice(&(self.dims as u32).to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_emb1(bytes: &[u8]) -> Result<Self, EmbedError> {
        if bytes.len() < HEADER {
            if bytes.len() >= 8 && bytes[..8] != EMB1_MAGIC {
                return Err(EmbedError::BadMagic);
            }
            return Err(EmbedError::Length {
                expected: HEADER as u64,
                actual: bytes.len() as u64,
            });
        }
        if bytes[..8] != EMB1_MAGIC {
            return Err(EmbedError::BadMagic);
        }
        let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let dims = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let expected = HEADER as u64 + rows as u64 * dims as u64 * 4;
        if bytes.len() as u64 != expected {
            return Err(EmbedError::Length {
                expected,
                actual: bytes.len() as u64,
            });
        }
        let data = bytes[HEADER..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(rows, dims, data)
    }
}

pub fn save_embeddings(m: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<(), EmbedError> {
    let path = path.as_ref();
    std::fs::write(path, m.to_emb1()).map_err(|source| EmbedError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix, EmbedError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| EmbedError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    EmbeddingMatrix::from_emb1(&bytes)
}
