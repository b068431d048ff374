use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::init::kmeans_plus_plus;
use super::{par_map_ranges, prepare_weights, total_variance, Assignments, ClusterKind, ClusterModel, FitParams};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm, sq_dist, Matrix};

const UNIT_TOL: f64 = 1e-6;

/// Spherical k-means: rows must be unit vectors; assignment by largest cosine,
/// centers are the renormalized weighted member sums. The traced objective
/// Σ wᵢ cos(xᵢ, c) never decreases.
pub fn fit_spherical_kmeans(
    data: &Matrix,
    weights: Option<&[f64]>,
    params: &FitParams,
) -> Result<ClusterModel> {
    for (i, r) in data.iter_rows().enumerate().take(data.rows()) {
        let n = norm(r);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotNormalized { row: i, norm: n });
        }
    }
    let w = prepare_weights(data, weights, params)?;
    let k = params.k;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let seeds = kmeans_plus_plus(data, &w, k, &mut rng);
    let mut centroids = data.select_rows(&seeds);
    let threshold = params.tol * total_variance(data);

    let mut trace = Vec::new();
    let mut iterations = 0;
    let (mut labels, mut sims): (Vec<usize>, Vec<f64>) =
        assign(data, &centroids, params.threads).into_iter().unzip();
    trace.push(objective(&sims, &w));
    while iterations < params.max_iter {
        let next = update(data, &mut labels, &mut sims, &w, k);
        let shift: f64 = next
            .iter_rows()
            .zip(centroids.iter_rows())
            .map(|(a, b)| sq_dist(a, b))
            .sum();
        centroids = next;
        iterations += 1;
        (labels, sims) = assign(data, &centroids, params.threads).into_iter().unzip();
        trace.push(objective(&sims, &w));
        if !params.pinned && shift <= threshold {
            break;
        }
    }
    fill_empty(&mut labels, &mut sims, &w, k);

    Ok(ClusterModel {
        kind: ClusterKind::Sk,
        k,
        centroids,
        medoids: None,
        gmm: None,
        assignments: Assignments::Hard(labels),
        trace,
        seed: params.seed,
        iterations_run: iterations,
    })
}

fn assign(data: &Matrix, centroids: &Matrix, threads: usize) -> Vec<(usize, f64)> {
    par_map_ranges(data.rows(), threads, |range| {
        range
            .map(|i| {
                let x = data.row(i);
                let mut best = (0, f64::NEG_INFINITY);
                for (c, centroid) in centroids.iter_rows().enumerate() {
                    let s = dot(x, centroid);
                    if s > best.1 {
                        best = (c, s);
                    }
                }
                best
            })
            .collect()
    })
}

/// Moves worst-fit points into empty clusters; worst maximizes (wᵢ(1−cosᵢ), 1−cosᵢ).
fn fill_empty(labels: &mut [usize], sims: &mut [f64], w: &[f64], k: usize) {
    let mut gap: Vec<f64> = sims.iter().map(|s| 1.0 - s).collect();
    super::kmeans::reseed_empty(labels, &mut gap, w, k);
    for (s, g) in sims.iter_mut().zip(&gap) {
        if *g == 0.0 {
            *s = 1.0;
        }
    }
}

fn update(data: &Matrix, labels: &mut [usize], sims: &mut [f64], w: &[f64], k: usize) -> Matrix {
    fill_empty(labels, sims, w, k);
    let m = data.cols();
    let mut out = Matrix::zeros(k, m);
    let mut plain = Matrix::zeros(k, m);
    for (i, &l) in labels.iter().enumerate() {
        for ((s, p), v) in out.row_mut(l).iter_mut().zip(plain.row_mut(l)).zip(data.row(i)) {
            *s += w[i] * v;
            *p += v;
        }
    }
    for c in 0..k {
        let mut nrm = norm(out.row(c));
        if nrm == 0.0 {
            // Zero-weight members (or a cancelling sum): fall back to the plain sum.
            let p = plain.row(c).to_vec();
            out.row_mut(c).copy_from_slice(&p);
            nrm = norm(out.row(c));
        }
        if nrm == 0.0 {
            // Members cancel exactly; take the first member as the center.
            let first = labels.iter().position(|&l| l == c).expect("cluster is nonempty");
            out.row_mut(c).copy_from_slice(data.row(first));
            nrm = 1.0;
        }
        out.row_mut(c).iter_mut().for_each(|v| *v /= nrm);
    }
    out
}

fn objective(sims: &[f64], w: &[f64]) -> f64 {
    sims.iter().zip(w).map(|(s, w)| s * w).sum()
}
