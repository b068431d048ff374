//! Wall-clock scaling of the clustering kernels.
//!
//! Every cell fits seeded synthetic Gaussian data with the iteration count
//! pinned, so the median time tracks per-iteration cost: O(knm) for km, sk and
//! kd assignment, O(knm²) for the GMM E and M steps. Timings run on one thread
//! unless `threads` says otherwise.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::Serialize;

use crate::clustering::{fit, ClusterKind, FitParams};
use crate::embeddings::normalize_matrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchAxis {
    N,
    M,
    K,
}

impl BenchAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::N => "n",
            Self::M => "m",
            Self::K => "k",
        }
    }
}

impl fmt::Display for BenchAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(Self::N),
            "m" => Ok(Self::M),
            "k" => Ok(Self::K),
            _ => Err(Error::InvalidArgument(format!("unknown bench axis {s:?}"))),
        }
    }
}

/// Sizes held fixed while one axis varies.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchBase {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Pinned iteration count.
    pub iterations: usize,
    /// Timed repetitions per cell (the median is reported); at least 5.
    pub reps: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for BenchBase {
    fn default() -> Self {
        BenchBase {
            n: 10_000,
            m: 100,
            k: 20,
            iterations: 20,
            reps: 5,
            seed: 0,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchCell {
    pub axis: BenchAxis,
    pub size: usize,
    pub algorithm: ClusterKind,
    pub median_seconds: f64,
    pub reps: usize,
}

pub const BENCH_CSV_HEADER: &str = "axis,size,algorithm,median_seconds,reps";

/// `n` points around `centers` Gaussian centers (spread 5) with unit noise.
pub fn synthetic_gaussian(n: usize, m: usize, centers: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = Normal::new(0.0, 5.0).expect("valid normal");
    let mus: Vec<Vec<f64>> = (0..centers.max(1))
        .map(|_| (0..m).map(|_| spread.sample(&mut rng)).collect())
        .collect();
    let mut data = Vec::with_capacity(n * m);
    for i in 0..n {
        let mu = &mus[i % mus.len()];
        for &c in mu {
            let z: f64 = StandardNormal.sample(&mut rng);
            data.push(c + z);
        }
    }
    Matrix::from_vec(n, m, data)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Median seconds of `reps` pinned fits, after one untimed warm-up fit.
pub fn time_fit(kind: ClusterKind, data: &Matrix, k: usize, base: &BenchBase) -> Result<f64> {
    let data = if kind == ClusterKind::Sk {
        normalize_matrix(data)?
    } else {
        data.clone()
    };
    let mut p = FitParams::for_kind(kind, k, base.seed);
    p.max_iter = base.iterations;
    p.pinned = true;
    p.threads = base.threads;
    fit(kind, &data, None, &p)?;
    let mut times = Vec::with_capacity(base.reps);
    for _ in 0..base.reps {
        let t = Instant::now();
        let model = fit(kind, &data, None, &p)?;
        times.push(t.elapsed().as_secs_f64());
        std::hint::black_box(model);
    }
    Ok(median(times))
}

/// Times `kind` at each size along `axis`, the other sizes taken from `base`.
pub fn bench_scaling(axis: BenchAxis, sizes: &[usize], kind: ClusterKind, base: &BenchBase) -> Result<Vec<BenchCell>> {
    if base.reps < 5 {
        return Err(Error::InvalidArgument(format!("at least 5 repetitions, got {}", base.reps)));
    }
    sizes
        .iter()
        .map(|&size| {
            let (n, m, k) = match axis {
                BenchAxis::N => (size, base.m, base.k),
                BenchAxis::M => (base.n, size, base.k),
                BenchAxis::K => (base.n, base.m, size),
            };
            let data = synthetic_gaussian(n, m, k, base.seed);
            Ok(BenchCell {
                axis,
                size,
                algorithm: kind,
                median_seconds: time_fit(kind, &data, k, base)?,
                reps: base.reps,
            })
        })
        .collect()
}

pub fn to_csv(cells: &[BenchCell]) -> String {
    let mut s = format!("{BENCH_CSV_HEADER}\n");
    for c in cells {
        let _ = writeln!(s, "{},{},{},{:.6},{}", c.axis, c.size, c.algorithm, c.median_seconds, c.reps);
    }
    s
}

/// Ratios of consecutive median times.
pub fn ratios(cells: &[BenchCell]) -> Vec<f64> {
    cells
        .windows(2)
        .map(|w| w[1].median_seconds / w[0].median_seconds)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_data_is_seeded() {
        assert_eq!(synthetic_gaussian(50, 4, 3, 9), synthetic_gaussian(50, 4, 3, 9));
        assert_ne!(synthetic_gaussian(50, 4, 3, 9), synthetic_gaussian(50, 4, 3, 8));
    }

    #[test]
    fn small_grid_and_csv() {
        let base = BenchBase {
            n: 200,
            m: 5,
            k: 3,
            iterations: 2,
            reps: 5,
            seed: 1,
            threads: 1,
        };
        for kind in [ClusterKind::Km, ClusterKind::Sk, ClusterKind::Kd, ClusterKind::Gmm] {
            let cells = bench_scaling(BenchAxis::N, &[100, 200], kind, &base).unwrap();
            assert_eq!(cells.len(), 2);
            assert!(cells.iter().all(|c| c.median_seconds >= 0.0));
        }
        let cells = bench_scaling(BenchAxis::K, &[1], ClusterKind::Km, &base).unwrap();
        let csv = to_csv(&cells);
        assert!(csv.starts_with("axis,size,algorithm,median_seconds,reps\nk,1,km,"));
        assert!(bench_scaling(BenchAxis::N, &[10], ClusterKind::Km, &BenchBase { reps: 3, ..base }).is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
