//! Embedding matrices aligned to a vocabulary, and initialization of the
//! rows a merge added.

mod emb1;
mod init;

pub use emb1::{load_embeddings, save_embeddings, EMB1_MAGIC};
pub use init::{init_new_embeddings, mean_rows, nachos_row, InitKind, InitStrategy};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("not an EMB1 file")]
    BadMagic,
    #[error("expected {expected} bytes, found {actual}")]
    Length { expected: u64, actual: u64 },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("{rows}x{dims} matrix needs {expected} values, got {actual}")]
    Shape {
        rows: usize,
        dims: usize,
        expected: usize,
        actual: usize,
    },
    #[error("matrix has {rows} rows but the tokenizer has {vocab_size} entries")]
    RowCount { rows: usize, vocab_size: usize },
    #[error("matrix has {actual} dimensions, expected {expected}")]
    Dims { expected: usize, actual: usize },
    #[error("piece {piece:?} (id {id}) segments to nothing")]
    EmptySegmentation { id: u32, piece: String },
    #[error("random scale must be positive and finite, got {0}")]
    Scale(f32),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Row-major f32 matrix. Row `i` is the vector of token id `i`. Every value
/// is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dims: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dims: usize, data: Vec<f32>) -> Result<Self, EmbedError> {
        if data.len() != rows * dims {
            return Err(EmbedError::Shape {
                rows,
                dims,
                expected: rows * dims,
                actual: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite {
                row: i / dims,
                col: i % dims,
            });
        }
        Ok(Self { rows, dims, data })
    }

    pub fn zeros(rows: usize, dims: usize) -> Self {
        Self {
            rows,
            dims,
            data: vec![0.0; rows * dims],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    /// Overwrites one row. Values must be finite.
    pub fn set_row(&mut self, i: usize, values: &[f32]) -> Result<(), EmbedError> {
        if values.len() != self.dims {
            return Err(EmbedError::Dims {
                expected: self.dims,
                actual: values.len(),
            });
        }
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite { row: i, col });
        }
        self.data[i * self.dims..(i + 1) * self.dims].copy_from_slice(values);
        Ok(())
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks(self.dims.max(1)).take(self.rows)
    }
}
