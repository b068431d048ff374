//! Weighted centroid clustering of embedding tables.
//!
//! Four algorithms share one parameter set and one fitted-model type:
//!
//! | kind | assignment            | center update                    | traced objective        |
//! |------|-----------------------|----------------------------------|-------------------------|
//! | km   | nearest (squared L2)  | weighted mean                    | Σ wᵢ‖xᵢ − c‖²            |
//! | sk   | largest cosine        | weighted mean, renormalized      | Σ wᵢ cos(xᵢ, c)          |
//! | kd   | nearest (L2)          | member minimizing Σ wᵢ‖xᵢ − m‖   | Σ wᵢ‖xᵢ − m‖             |
//! | gmm  | responsibilities (EM) | weighted M-step, full covariance | −Σ wᵢ log p(xᵢ)          |
//!
//! Weights act as point multiplicities. Passing `None` is the same as passing
//! a weight of 1 for every row. Per-iteration cost is O(knm) for the hard
//! clustering kinds and O(knm² + km³) for the GMM.

mod artifact;
mod gmm;
mod init;
mod kmeans;
mod kmedoids;
mod spherical;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use artifact::{read_model, write_model};
pub use gmm::{default_reg, fit_gmm, log_density, GmmParams};
pub use kmeans::fit_kmeans;
pub use kmedoids::fit_kmedoids;
pub use spherical::fit_spherical_kmeans;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterKind {
    Km,
    Sk,
    Kd,
    Gmm,
}

impl ClusterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Km => "km",
            Self::Sk => "sk",
            Self::Kd => "kd",
            Self::Gmm => "gmm",
        }
    }
}

impl fmt::Display for ClusterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClusterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "km" | "kmeans" => Ok(Self::Km),
            "sk" | "spherical" => Ok(Self::Sk),
            "kd" | "kmedoids" => Ok(Self::Kd),
            "gmm" => Ok(Self::Gmm),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitParams {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Relative tolerance: squared centroid shift over total data variance
    /// (km/sk/kd), or relative log-likelihood change (gmm).
    pub tol: f64,
    /// GMM covariance floor; `None` means [`default_reg`].
    pub reg: Option<f64>,
    /// Run exactly `max_iter` iterations, ignoring `tol`.
    pub pinned: bool,
    /// Worker threads for the assignment step of km/sk. Results do not depend on it.
    pub threads: usize,
}

impl FitParams {
    pub fn new(k: usize, seed: u64) -> Self {
        FitParams {
            k,
            seed,
            max_iter: 300,
            tol: 1e-4,
            reg: None,
            pinned: false,
            threads: 1,
        }
    }

    /// The defaults for `kind`: 1e-4 for centroid methods, 1e-5 for GMM.
    pub fn for_kind(kind: ClusterKind, k: usize, seed: u64) -> Self {
        let mut p = Self::new(k, seed);
        if kind == ClusterKind::Gmm {
            p.tol = 1e-5;
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Assignments {
    Hard(Vec<usize>),
    /// n×k row-stochastic responsibilities.
    Soft(Matrix),
}

impl Assignments {
    /// Hard labels; for soft assignments the most responsible component.
    pub fn labels(&self) -> Vec<usize> {
        match self {
            Assignments::Hard(l) => l.clone(),
            Assignments::Soft(r) => r
                .iter_rows()
                .map(argmax_first)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub kind: ClusterKind,
    pub k: usize,
    /// Cluster centers: means for km/gmm, unit vectors for sk, data rows for kd.
    pub centroids: Matrix,
    /// Row indices of the medoids (kd only).
    pub medoids: Option<Vec<usize>>,
    pub gmm: Option<GmmParams>,
    pub assignments: Assignments,
    /// Objective after every assignment/E step; see the module table.
    pub trace: Vec<f64>,
    pub seed: u64,
    pub iterations_run: usize,
}

impl ClusterModel {
    pub fn dim(&self) -> usize {
        self.centroids.cols()
    }

    /// Members of each cluster under the hard labels, in ascending row order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, l) in self.assignments.labels().into_iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// Fits `kind` on the rows of `data`.
pub fn fit(
    kind: ClusterKind,
    data: &Matrix,
    weights: Option<&[f64]>,
    params: &FitParams,
) -> Result<ClusterModel> {
    match kind {
        ClusterKind::Km => fit_kmeans(data, weights, params),
        ClusterKind::Sk => fit_spherical_kmeans(data, weights, params),
        ClusterKind::Kd => fit_kmedoids(data, weights, params),
        ClusterKind::Gmm => fit_gmm(data, weights, params),
    }
}

pub(crate) fn argmax_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Validates inputs shared by every algorithm and resolves the weights.
pub(crate) fn prepare_weights(
    data: &Matrix,
    weights: Option<&[f64]>,
    params: &FitParams,
) -> Result<Vec<f64>> {
    let n = data.rows();
    if params.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if params.k > n {
        return Err(Error::InvalidArgument(format!("k={} exceeds n={n}", params.k)));
    }
    if data.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("data contains non-finite values".into()));
    }
    let w = match weights {
        None => vec![1.0; n],
        Some(w) => {
            if w.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} weights for {n} rows",
                    w.len()
                )));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
            }
            if !w.iter().any(|&x| x > 0.0) {
                return Err(Error::InvalidArgument("all weights are zero".into()));
            }
            w.to_vec()
        }
    };
    let distinct = count_distinct(data, params.k);
    if distinct < params.k {
        return Err(Error::DegenerateInput {
            k: params.k,
            distinct,
        });
    }
    Ok(w)
}

/// Number of distinct rows, counting no further than `limit`.
fn count_distinct(data: &Matrix, limit: usize) -> usize {
    let mut seen = std::collections::HashSet::new();
    for r in data.iter_rows().take(data.rows()) {
        let key: Vec<u64> = r.iter().map(|v| (v + 0.0).to_bits()).collect();
        seen.insert(key);
        if seen.len() >= limit {
            break;
        }
    }
    seen.len()
}

/// Sum over features of the (unweighted) variance; scales the shift tolerance.
pub(crate) fn total_variance(data: &Matrix) -> f64 {
    let n = data.rows() as f64;
    let m = data.cols();
    let mut mean = vec![0.0; m];
    for r in data.iter_rows() {
        mean.iter_mut().zip(r).for_each(|(a, b)| *a += b);
    }
    mean.iter_mut().for_each(|a| *a /= n);
    data.iter_rows()
        .map(|r| crate::matrix::sq_dist(r, &mean))
        .sum::<f64>()
        / n
}

/// Runs `f` over contiguous index ranges on up to `threads` scoped threads and
/// concatenates the results in index order.
pub(crate) fn par_map_ranges<T: Send>(
    n: usize,
    threads: usize,
    f: impl Fn(std::ops::Range<usize>) -> Vec<T> + Sync,
) -> Vec<T> {
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        return f(0..n);
    }
    let chunk = n.div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let f = &f;
                s.spawn(move || f(t * chunk..((t + 1) * chunk).min(n)))
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}
