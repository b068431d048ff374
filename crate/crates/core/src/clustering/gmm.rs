use nalgebra::{Cholesky, DMatrix, DVector};

use super::kmeans::lloyd;
use super::{prepare_weights, Assignments, ClusterKind, ClusterModel, FitParams};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Fitted mixture parameters. Every covariance already includes `reg` on its
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmParams {
    pub means: Matrix,
    pub covariances: Vec<Matrix>,
    pub mixture_weights: Vec<f64>,
    pub reg: f64,
}

/// 1e-6 times the mean weighted per-feature variance.
pub fn default_reg(data: &Matrix, w: &[f64]) -> f64 {
    let m = data.cols();
    let total: f64 = w.iter().sum();
    let mut mean = vec![0.0; m];
    for (r, &wi) in data.iter_rows().zip(w) {
        mean.iter_mut().zip(r).for_each(|(a, b)| *a += wi * b);
    }
    mean.iter_mut().for_each(|a| *a /= total);
    let mut var = 0.0;
    for (r, &wi) in data.iter_rows().zip(w) {
        var += wi * crate::matrix::sq_dist(r, &mean);
    }
    let mean_var = var / total / m as f64;
    if mean_var > 0.0 {
        1e-6 * mean_var
    } else {
        1e-12
    }
}

struct Factor {
    /// L⁻¹ where Σ = LLᵀ.
    prec_chol: DMatrix<f64>,
    /// −½(m ln 2π + ln|Σ|)
    log_norm: f64,
}

fn factorize(params: &GmmParams) -> Result<Vec<Factor>> {
    let m = params.means.cols();
    params
        .covariances
        .iter()
        .enumerate()
        .map(|(c, cov)| {
            let chol = Cholesky::new(cov.to_dmatrix())
                .ok_or(Error::SingularCovariance { component: c })?;
            let l = chol.l();
            let log_det: f64 = 2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
            let prec_chol = l
                .solve_lower_triangular(&DMatrix::identity(m, m))
                .ok_or(Error::SingularCovariance { component: c })?;
            Ok(Factor {
                prec_chol,
                log_norm: -0.5 * (m as f64 * LN_2PI + log_det),
            })
        })
        .collect()
}

impl GmmParams {
    pub fn k(&self) -> usize {
        self.mixture_weights.len()
    }

    /// ln f(xᵢ | μ_c, Σ_c) for every row and component, mixture weights excluded.
    pub fn component_log_densities(&self, data: &Matrix) -> Result<Matrix> {
        let x = data.to_dmatrix();
        let factors = factorize(self)?;
        Ok(Matrix::from_dmatrix(&log_densities(&x, &self.means, &factors)))
    }
}

/// ln f(x | μ_c, Σ_c) for a single point.
pub fn log_density(params: &GmmParams, x: &[f64], component: usize) -> Result<f64> {
    let one = Matrix::from_vec(1, x.len(), x.to_vec());
    Ok(params.component_log_densities(&one)?.row(0)[component])
}

fn log_densities(x: &DMatrix<f64>, means: &Matrix, factors: &[Factor]) -> DMatrix<f64> {
    let (n, m) = x.shape();
    let mut out = DMatrix::zeros(n, factors.len());
    let mut centered = DMatrix::zeros(n, m);
    for (c, f) in factors.iter().enumerate() {
        let mu = means.row(c);
        for j in 0..m {
            for i in 0..n {
                centered[(i, j)] = x[(i, j)] - mu[j];
            }
        }
        let y = &centered * f.prec_chol.transpose();
        for i in 0..n {
            let maha: f64 = y.row(i).iter().map(|v| v * v).sum();
            out[(i, c)] = f.log_norm - 0.5 * maha;
        }
    }
    out
}

/// Weighted M-step. Components with no responsibility mass keep `prev`'s
/// mean and covariance and get mixture weight 0.
fn m_step(
    x: &DMatrix<f64>,
    w: &[f64],
    resp: &DMatrix<f64>,
    reg: f64,
    prev: &GmmParams,
) -> GmmParams {
    let (n, m) = x.shape();
    let k = resp.ncols();
    let total: f64 = w.iter().sum();
    let mut means = prev.means.clone();
    let mut covariances = prev.covariances.clone();
    let mut mixture_weights = vec![0.0; k];
    let mut z = DMatrix::zeros(n, m);
    for c in 0..k {
        let wr: Vec<f64> = (0..n).map(|i| w[i] * resp[(i, c)]).collect();
        let nc: f64 = wr.iter().sum();
        if nc <= 0.0 {
            continue;
        }
        mixture_weights[c] = nc / total;
        let mut mu = DVector::zeros(m);
        for j in 0..m {
            let mut s = 0.0;
            for i in 0..n {
                s += wr[i] * x[(i, j)];
            }
            mu[j] = s / nc;
        }
        for j in 0..m {
            for i in 0..n {
                z[(i, j)] = wr[i].sqrt() * (x[(i, j)] - mu[j]);
            }
        }
        let mut cov = z.transpose() * &z / nc;
        for a in 0..m {
            for b in 0..a {
                let s = 0.5 * (cov[(a, b)] + cov[(b, a)]);
                cov[(a, b)] = s;
                cov[(b, a)] = s;
            }
            cov[(a, a)] += reg;
        }
        means.row_mut(c).copy_from_slice(mu.as_slice());
        covariances[c] = Matrix::from_dmatrix(&cov);
    }
    GmmParams {
        means,
        covariances,
        mixture_weights,
        reg,
    }
}

/// Weighted EM for a full-covariance Gaussian mixture.
///
/// Initialized from 10 weighted k-means iterations with the same seed. Each
/// iteration evaluates log-densities through a Cholesky factor of every
/// covariance, normalizes responsibilities in log space, and re-estimates all
/// parameters with wᵢ·r_ic as point mass. `reg` is added to every covariance
/// diagonal. The trace holds the weighted negative log-likelihood.
pub fn fit_gmm(data: &Matrix, weights: Option<&[f64]>, params: &FitParams) -> Result<ClusterModel> {
    let w = prepare_weights(data, weights, params)?;
    let reg = params.reg.unwrap_or_else(|| default_reg(data, &w));
    if !(reg > 0.0 && reg.is_finite()) {
        return Err(Error::InvalidArgument(format!("reg must be positive, got {reg}")));
    }
    let (n, m, k) = (data.rows(), data.cols(), params.k);

    let init = lloyd(
        data,
        &w,
        &FitParams {
            max_iter: 10,
            pinned: false,
            ..params.clone()
        },
    );
    let mut resp = DMatrix::zeros(n, k);
    for (i, l) in init.assignments.labels().into_iter().enumerate() {
        resp[(i, l)] = 1.0;
    }
    let x = data.to_dmatrix();
    // Fallback covariance for components the initial labels leave empty.
    let global = m_step(&x, &w, &DMatrix::from_element(n, 1, 1.0), reg, &GmmParams {
        means: Matrix::zeros(1, m),
        covariances: vec![Matrix::zeros(m, m)],
        mixture_weights: vec![1.0],
        reg,
    })
    .covariances
    .remove(0);
    let mut gp = m_step(&x, &w, &resp, reg, &GmmParams {
        means: init.centroids.clone(),
        covariances: vec![global; k],
        mixture_weights: vec![0.0; k],
        reg,
    });

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut prev_ll: Option<f64> = None;
    loop {
        let factors = factorize(&gp)?;
        let mut logp = log_densities(&x, &gp.means, &factors);
        for c in 0..k {
            let lp = gp.mixture_weights[c].ln();
            logp.column_mut(c).iter_mut().for_each(|v| *v += lp);
        }
        let mut ll = 0.0;
        for i in 0..n {
            let row = logp.row(i);
            let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = mx + row.iter().map(|v| (v - mx).exp()).sum::<f64>().ln();
            for c in 0..k {
                resp[(i, c)] = (logp[(i, c)] - lse).exp();
            }
            ll += w[i] * lse;
        }
        trace.push(-ll);
        let converged = prev_ll.is_some_and(|p| (ll - p).abs() <= params.tol * ll.abs());
        if (!params.pinned && converged) || iterations >= params.max_iter {
            break;
        }
        prev_ll = Some(ll);
        gp = m_step(&x, &w, &resp, reg, &gp);
        iterations += 1;
    }

    Ok(ClusterModel {
        kind: ClusterKind::Gmm,
        k,
        centroids: gp.means.clone(),
        medoids: None,
        gmm: Some(gp),
        assignments: Assignments::Soft(Matrix::from_dmatrix(&resp)),
        trace,
        seed: params.seed,
        iterations_run: iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn two_gaussians(per: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for c in [0.0, 10.0] {
            for _ in 0..per {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                rows.push([c + a, c + b]);
            }
        }
        Matrix::from_rows(&rows)
    }

    #[test]
    fn recovers_two_gaussians() {
        let data = two_gaussians(300, 11);
        let m = fit_gmm(&data, None, &FitParams::for_kind(ClusterKind::Gmm, 2, 0)).unwrap();
        let gp = m.gmm.unwrap();
        let mut means: Vec<Vec<f64>> = gp.means.iter_rows().map(|r| r.to_vec()).collect();
        means.sort_by(|a, b| a[0].total_cmp(&b[0]));
        for (mu, t) in means.iter().zip([0.0, 10.0]) {
            assert!((mu[0] - t).abs() < 0.3 && (mu[1] - t).abs() < 0.3, "{mu:?}");
        }
        for p in &gp.mixture_weights {
            assert!((p - 0.5).abs() < 0.1);
        }
        assert!((gp.mixture_weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_component_is_closed_form() {
        let data = Matrix::from_rows(&[[0.0, 1.0], [2.0, 0.5], [1.0, -1.0], [4.0, 3.0]]);
        let w = [1.0, 2.0, 0.5, 3.0];
        let mut p = FitParams::for_kind(ClusterKind::Gmm, 1, 0);
        p.reg = Some(1e-3);
        let gp = fit_gmm(&data, Some(&w), &p).unwrap().gmm.unwrap();
        let tw: f64 = w.iter().sum();
        let mut mu = [0.0; 2];
        for (r, wi) in data.iter_rows().zip(w) {
            mu[0] += wi * r[0] / tw;
            mu[1] += wi * r[1] / tw;
        }
        for (got, want) in gp.means.row(0).iter().zip(mu) {
            assert!((got - want).abs() < 1e-12);
        }
        for a in 0..2 {
            for b in 0..2 {
                let mut s = 0.0;
                for (r, wi) in data.iter_rows().zip(w) {
                    s += wi * (r[a] - mu[a]) * (r[b] - mu[b]);
                }
                let want = s / tw + if a == b { 1e-3 } else { 0.0 };
                assert!((gp.covariances[0].row(a)[b] - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn nll_nonincreasing_and_covariance_floor() {
        let data = two_gaussians(100, 5);
        let w: Vec<f64> = (0..200).map(|i| 0.5 + (i % 3) as f64).collect();
        let mut p = FitParams::for_kind(ClusterKind::Gmm, 3, 2);
        p.reg = Some(1e-2);
        let m = fit_gmm(&data, Some(&w), &p).unwrap();
        for t in m.trace.windows(2) {
            assert!(t[1] <= t[0] + 1e-6 * t[0].abs(), "{t:?}");
        }
        for cov in &m.gmm.as_ref().unwrap().covariances {
            let eig = nalgebra::SymmetricEigen::new(cov.to_dmatrix());
            assert!(eig.eigenvalues.min() >= 1e-2 * (1.0 - 1e-9));
            assert_eq!(cov.to_dmatrix(), cov.to_dmatrix().transpose());
        }
        if let Assignments::Soft(r) = &m.assignments {
            for row in r.iter_rows() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        } else {
            panic!("gmm assignments must be soft");
        }
    }

    #[test]
    fn log_density_matches_closed_form() {
        let gp = GmmParams {
            means: Matrix::from_rows(&[[1.0, -1.0]]),
            covariances: vec![Matrix::from_rows(&[[2.0, 0.0], [0.0, 0.5]])],
            mixture_weights: vec![1.0],
            reg: 0.0,
        };
        let got = log_density(&gp, &[2.0, 0.0], 0).unwrap();
        let want = -LN_2PI - 0.5 * (1.0f64).ln() - 0.5 * (1.0 / 2.0 + 1.0 / 0.5);
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_reg() {
        let data = two_gaussians(10, 0);
        let mut p = FitParams::for_kind(ClusterKind::Gmm, 2, 0);
        p.reg = Some(0.0);
        assert!(fit_gmm(&data, None, &p).is_err());
    }
}
