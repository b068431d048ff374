//! Pre-trained embedding tables aligned to a vocabulary.

mod io;
mod pca;

pub use io::{load_embeddings, read_embeddings, write_word2vec_text, EmbeddingFormat};
pub use pca::{pca_reduce, PcaModel};

use crate::error::{Error, Result};
use crate::matrix::{norm, Matrix};

/// Row `i` holds the vector of working-vocabulary type `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub vectors: Matrix,
    /// Fraction of the corpus vocabulary that received a vector.
    pub coverage: f64,
    pub source_name: String,
}

impl EmbeddingTable {
    pub fn new(vectors: Matrix, coverage: f64, source_name: impl Into<String>) -> Self {
        EmbeddingTable {
            vectors,
            coverage,
            source_name: source_name.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.rows() == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.vectors.row(i)
    }

    /// Checks that no entry is non-finite and no row is all zeros.
    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.vectors.iter_rows().enumerate() {
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::format(format!("row {i}"), "non-finite entry"));
            }
            if r.iter().all(|&v| v == 0.0) {
                return Err(Error::ZeroVector { row: i });
            }
        }
        Ok(())
    }
}

/// Scales every row to unit Euclidean norm.
pub fn normalize_rows(table: &EmbeddingTable) -> Result<EmbeddingTable> {
    Ok(EmbeddingTable {
        vectors: normalize_matrix(&table.vectors)?,
        ..table.clone()
    })
}

/// [`normalize_rows`] on a bare matrix.
pub fn normalize_matrix(data: &Matrix) -> Result<Matrix> {
    let mut out = data.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let n = norm(row);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector { row: i });
        }
        row.iter_mut().for_each(|v| *v /= n);
    }
    Ok(out)
}
