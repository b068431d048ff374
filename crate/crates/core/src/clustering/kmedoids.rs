use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::init::kmeans_plus_plus;
use super::{prepare_weights, Assignments, ClusterKind, ClusterModel, FitParams};
use crate::error::Result;
use crate::matrix::{sq_dist, Matrix};

/// k-medoids by alternating assignment and medoid update.
///
/// Rows go to the nearest medoid (Euclidean, lowest index on ties); each medoid
/// then moves to the member minimizing Σ wᵢ‖xᵢ − m‖ over its cluster, keeping
/// the current medoid on ties. Stops when no medoid moves. The update costs
/// O(n_c² m) per cluster.
pub fn fit_kmedoids(data: &Matrix, weights: Option<&[f64]>, params: &FitParams) -> Result<ClusterModel> {
    let w = prepare_weights(data, weights, params)?;
    let k = params.k;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut medoids = kmeans_plus_plus(data, &w, k, &mut rng);

    let mut trace = Vec::new();
    let mut iterations = 0;
    let (mut labels, mut dist) = assign(data, &medoids);
    trace.push(cost(&dist, &w));
    while iterations < params.max_iter {
        fill_empty(&mut medoids, &mut labels, &mut dist, &w);
        let next = update(data, &medoids, &labels, &w);
        iterations += 1;
        let moved = next != medoids;
        medoids = next;
        (labels, dist) = assign(data, &medoids);
        trace.push(cost(&dist, &w));
        if !params.pinned && !moved {
            break;
        }
    }
    fill_empty(&mut medoids, &mut labels, &mut dist, &w);

    Ok(ClusterModel {
        kind: ClusterKind::Kd,
        k,
        centroids: data.select_rows(&medoids),
        medoids: Some(medoids),
        gmm: None,
        assignments: Assignments::Hard(labels),
        trace,
        seed: params.seed,
        iterations_run: iterations,
    })
}

fn assign(data: &Matrix, medoids: &[usize]) -> (Vec<usize>, Vec<f64>) {
    data.iter_rows()
        .take(data.rows())
        .map(|x| {
            let mut best = (0, f64::INFINITY);
            for (c, &m) in medoids.iter().enumerate() {
                let d = sq_dist(x, data.row(m));
                if d < best.1 {
                    best = (c, d);
                }
            }
            (best.0, best.1.sqrt())
        })
        .unzip()
}

/// A medoid that coincides with another medoid's coordinates can end up with
/// no members; it is replaced by the worst-fit point (largest (wᵢdᵢ, dᵢ)).
fn fill_empty(medoids: &mut [usize], labels: &mut [usize], dist: &mut [f64], w: &[f64]) {
    let k = medoids.len();
    let mut counts = vec![0usize; k];
    labels.iter().for_each(|&l| counts[l] += 1);
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut best: Option<usize> = None;
        for i in 0..labels.len() {
            if counts[labels[i]] < 2 || medoids.contains(&i) {
                continue;
            }
            if best.is_none_or(|b| (w[i] * dist[i], dist[i]) > (w[b] * dist[b], dist[b])) {
                best = Some(i);
            }
        }
        let i = best.expect("n >= k guarantees a donor cluster");
        counts[labels[i]] -= 1;
        counts[c] += 1;
        labels[i] = c;
        dist[i] = 0.0;
        medoids[c] = i;
    }
}

fn update(data: &Matrix, medoids: &[usize], labels: &[usize], w: &[f64]) -> Vec<usize> {
    let k = medoids.len();
    let mut members = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    (0..k)
        .map(|c| {
            let within = |j: usize| -> f64 {
                members[c]
                    .iter()
                    .map(|&i| w[i] * sq_dist(data.row(i), data.row(j)).sqrt())
                    .sum()
            };
            let mut best = medoids[c];
            let mut best_cost = within(best);
            for &j in &members[c] {
                let cj = within(j);
                if cj < best_cost {
                    best = j;
                    best_cost = cj;
                }
            }
            best
        })
        .collect()
}

fn cost(dist: &[f64], w: &[f64]) -> f64 {
    dist.iter().zip(w).map(|(d, w)| d * w).sum()
}
