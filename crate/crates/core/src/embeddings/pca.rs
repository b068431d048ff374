use nalgebra::{DMatrix, SymmetricEigen};

use super::EmbeddingTable;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Principal axes of a mean-centered table.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `target_dim` rows, each a unit-length principal axis of length `dim`.
    pub components: Matrix,
    /// Eigenvalues of the centered scatter matrix `XᵀX`, descending, all of them.
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    /// Fits on all rows of `data`. Each axis is oriented so that its
    /// largest-magnitude coordinate is positive.
    pub fn fit(data: &Matrix, target_dim: usize) -> Result<Self> {
        let (n, m) = (data.rows(), data.cols());
        if target_dim == 0 || target_dim > m {
            return Err(Error::InvalidArgument(format!(
                "target_dim must be in 1..={m}, got {target_dim}"
            )));
        }
        let mut mean = vec![0.0; m];
        for r in data.iter_rows() {
            mean.iter_mut().zip(r).for_each(|(a, b)| *a += b);
        }
        mean.iter_mut().for_each(|a| *a /= n.max(1) as f64);

        let centered = centered(data, &mean);
        let scatter = centered.transpose() * &centered;
        let eig = SymmetricEigen::new(scatter);

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .total_cmp(&eig.eigenvalues[a])
                .then(a.cmp(&b))
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        let top = eigenvalues.first().copied().unwrap_or(0.0);
        let rank = eigenvalues
            .iter()
            .filter(|&&l| l > top * 1e-12 && l > 0.0)
            .count();
        if rank < target_dim {
            return Err(Error::RankDeficient {
                rank,
                requested: target_dim,
            });
        }

        let mut components = Matrix::zeros(target_dim, m);
        for (c, &i) in order.iter().take(target_dim).enumerate() {
            let col = eig.eigenvectors.column(i);
            let mut pivot = 0;
            for j in 1..m {
                if col[j].abs() > col[pivot].abs() {
                    pivot = j;
                }
            }
            let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
            for (dst, v) in components.row_mut(c).iter_mut().zip(col.iter()) {
                *dst = sign * v;
            }
        }
        Ok(PcaModel {
            mean,
            components,
            eigenvalues,
        })
    }

    pub fn transform(&self, data: &Matrix) -> Matrix {
        let centered = centered(data, &self.mean);
        let axes = self.components.to_dmatrix();
        Matrix::from_dmatrix(&(centered * axes.transpose()))
    }
}

fn centered(data: &Matrix, mean: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(data.rows(), data.cols(), |i, j| data.row(i)[j] - mean[j])
}

/// Projects the table onto its top `target_dim` principal components.
pub fn pca_reduce(table: &EmbeddingTable, target_dim: usize) -> Result<EmbeddingTable> {
    let model = PcaModel::fit(&table.vectors, target_dim)?;
    Ok(EmbeddingTable {
        vectors: model.transform(&table.vectors),
        coverage: table.coverage,
        source_name: table.source_name.clone(),
    })
}
