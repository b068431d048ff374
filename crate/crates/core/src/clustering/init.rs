use rand::Rng;

use crate::matrix::{sq_dist, Matrix};

/// Weighted k-means++ seeding. The first center is drawn with probability
/// proportional to `w`, each following one proportional to `w·D²`, where D is
/// the distance to the nearest chosen center. Falls back to plain `D²` when
/// every remaining candidate has zero weight.
///
/// Callers guarantee at least `k` distinct rows, so the returned indices point
/// at pairwise distinct rows.
pub(crate) fn kmeans_plus_plus(data: &Matrix, w: &[f64], k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = data.rows();
    let mut chosen = Vec::with_capacity(k);
    chosen.push(sample(w, rng).expect("some weight is positive"));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(data.row(i), data.row(chosen[0]))).collect();
    while chosen.len() < k {
        let scores: Vec<f64> = d2.iter().zip(w).map(|(d, w)| d * w).collect();
        let next = sample(&scores, rng)
            .or_else(|| sample(&d2, rng))
            .expect("fewer distinct rows than clusters");
        chosen.push(next);
        let c = data.row(next);
        for (i, d) in d2.iter_mut().enumerate() {
            let nd = sq_dist(data.row(i), c);
            if nd < *d {
                *d = nd;
            }
        }
    }
    chosen
}

/// Index drawn with probability proportional to `scores`; `None` if they sum to zero.
fn sample(scores: &[f64], rng: &mut impl Rng) -> Option<usize> {
    let total: f64 = scores.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &s) in scores.iter().enumerate() {
        if s > 0.0 {
            acc += s;
            last_positive = Some(i);
            if acc > target {
                return Some(i);
            }
        }
    }
    last_positive
}
