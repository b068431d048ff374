use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::init::kmeans_plus_plus;
use super::{par_map_ranges, prepare_weights, total_variance, Assignments, ClusterKind, ClusterModel, FitParams};
use crate::error::Result;
use crate::matrix::{sq_dist, Matrix};

/// Weighted Lloyd iterations minimizing Σ wᵢ‖xᵢ − c_{a(i)}‖².
pub fn fit_kmeans(data: &Matrix, weights: Option<&[f64]>, params: &FitParams) -> Result<ClusterModel> {
    let w = prepare_weights(data, weights, params)?;
    Ok(lloyd(data, &w, params))
}

/// Nearest centroid per row (lowest index wins ties) and its squared distance.
pub(crate) fn assign(data: &Matrix, centroids: &Matrix, threads: usize) -> Vec<(usize, f64)> {
    par_map_ranges(data.rows(), threads, |range| {
        range
            .map(|i| {
                let x = data.row(i);
                let mut best = (0, f64::INFINITY);
                for (c, centroid) in centroids.iter_rows().enumerate() {
                    let d = sq_dist(x, centroid);
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                best
            })
            .collect()
    })
}

/// Moves the worst-fit points into empty clusters. The worst fit maximizes
/// (wᵢ·dᵢ, dᵢ); only points whose cluster keeps another member are eligible.
pub(crate) fn reseed_empty(labels: &mut [usize], dist: &mut [f64], w: &[f64], k: usize) {
    let mut counts = vec![0usize; k];
    labels.iter().for_each(|&l| counts[l] += 1);
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut best: Option<usize> = None;
        for i in 0..labels.len() {
            if counts[labels[i]] < 2 {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => (w[i] * dist[i], dist[i]) > (w[b] * dist[b], dist[b]),
            };
            if better {
                best = Some(i);
            }
        }
        let i = best.expect("n >= k guarantees a donor cluster");
        counts[labels[i]] -= 1;
        counts[c] += 1;
        labels[i] = c;
        dist[i] = 0.0;
    }
}

/// Weighted mean of each cluster; clusters whose members all have zero weight
/// fall back to the unweighted mean.
pub(crate) fn weighted_means(data: &Matrix, labels: &[usize], w: &[f64], k: usize) -> Matrix {
    let m = data.cols();
    let mut sums = Matrix::zeros(k, m);
    let mut plain = Matrix::zeros(k, m);
    let mut wsum = vec![0.0; k];
    let mut count = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        let x = data.row(i);
        for (s, v) in sums.row_mut(l).iter_mut().zip(x) {
            *s += w[i] * v;
        }
        for (s, v) in plain.row_mut(l).iter_mut().zip(x) {
            *s += v;
        }
        wsum[l] += w[i];
        count[l] += 1;
    }
    for c in 0..k {
        if wsum[c] > 0.0 {
            sums.row_mut(c).iter_mut().for_each(|s| *s /= wsum[c]);
        } else {
            let p: Vec<f64> = plain.row(c).iter().map(|s| s / count[c] as f64).collect();
            sums.row_mut(c).copy_from_slice(&p);
        }
    }
    sums
}

pub(crate) fn lloyd(data: &Matrix, w: &[f64], params: &FitParams) -> ClusterModel {
    let k = params.k;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let seeds = kmeans_plus_plus(data, w, k, &mut rng);
    let mut centroids = data.select_rows(&seeds);
    let threshold = params.tol * total_variance(data);

    let mut trace = Vec::new();
    let mut iterations = 0;
    let (mut labels, mut dist): (Vec<usize>, Vec<f64>) =
        assign(data, &centroids, params.threads).into_iter().unzip();
    trace.push(cost(&dist, w));
    while iterations < params.max_iter {
        reseed_empty(&mut labels, &mut dist, w, k);
        let next = weighted_means(data, &labels, w, k);
        let shift: f64 = next
            .iter_rows()
            .zip(centroids.iter_rows())
            .map(|(a, b)| sq_dist(a, b))
            .sum();
        centroids = next;
        iterations += 1;
        (labels, dist) = assign(data, &centroids, params.threads).into_iter().unzip();
        trace.push(cost(&dist, w));
        if !params.pinned && shift <= threshold {
            break;
        }
    }
    // Labels from the final assignment can leave a cluster empty; keep k groups.
    reseed_empty(&mut labels, &mut dist, w, k);

    ClusterModel {
        kind: ClusterKind::Km,
        k,
        centroids,
        medoids: None,
        gmm: None,
        assignments: Assignments::Hard(labels),
        trace,
        seed: params.seed,
        iterations_run: iterations,
    }
}

fn cost(dist: &[f64], w: &[f64]) -> f64 {
    dist.iter().zip(w).map(|(d, w)| d * w).sum()
}
