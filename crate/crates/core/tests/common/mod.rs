//! Helpers shared by the integration tests. Nothing here calls into the
//! library's counting or clustering code.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashSet;
use std::path::PathBuf;

use embtopics::corpus::{Document, Split};
use embtopics::evaluation::WindowMode;
use embtopics::pipeline::{CorpusFormat, RunConfig};
use embtopics::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn word(i: usize) -> String {
    format!("w{i:02}")
}

/// Test-split documents over `types` words, skewed toward low indices.
/// Lengths run from 0 to 40 tokens, so empty and short documents occur.
pub fn random_test_docs(n: usize, types: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|d| {
            let len = rng.random_range(0..=40);
            let tokens = (0..len)
                .map(|_| {
                    let u: f64 = rng.random();
                    word(((u * u) * types as f64) as usize % types)
                })
                .collect();
            Document {
                id: format!("d{d}"),
                tokens,
                split: Split::Test,
            }
        })
        .collect()
}

/// Every co-occurrence window as a set of words.
pub fn brute_windows(docs: &[Document], mode: WindowMode) -> Vec<HashSet<String>> {
    let mut out = Vec::new();
    for d in docs.iter().filter(|d| d.split == Split::Test) {
        let len = d.tokens.len();
        if len == 0 {
            continue;
        }
        let width = match mode {
            WindowMode::Sliding(w) => w.min(len),
            WindowMode::Document => len,
        };
        for start in 0..=len - width {
            out.push(d.tokens[start..start + width].iter().cloned().collect());
        }
    }
    out
}

/// Mean NPMI over word pairs, counting windows directly.
pub fn brute_npmi(topic: &[String], windows: &[HashSet<String>]) -> f64 {
    let n = windows.len() as f64;
    let count = |f: &dyn Fn(&HashSet<String>) -> bool| windows.iter().filter(|w| f(w)).count() as f64;
    let mut sum = 0.0;
    let mut pairs = 0;
    for i in 0..topic.len() {
        for j in i + 1..topic.len() {
            let (a, b) = (&topic[i], &topic[j]);
            let pa = count(&|w| w.contains(a)) / n;
            let pb = count(&|w| w.contains(b)) / n;
            let pab = count(&|w| w.contains(a) && w.contains(b)) / n;
            sum += if pa == 0.0 || pb == 0.0 || pab == 0.0 {
                -1.0
            } else if pab == 1.0 {
                1.0
            } else {
                (pab / (pa * pb)).ln() / -pab.ln()
            };
            pairs += 1;
        }
    }
    if pairs == 0 {
        0.0
    } else {
        sum / pairs as f64
    }
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize, scale: f64) -> Matrix {
    let data = (0..n * m).map(|_| rng.random_range(-scale..scale)).collect();
    Matrix::from_vec(n, m, data)
}

fn weighted_means(data: &Matrix, w: &[f64], labels: &[usize], k: usize) -> Vec<Option<Vec<f64>>> {
    let m = data.cols();
    let mut sums = vec![vec![0.0; m]; k];
    let mut ws = vec![0.0; k];
    for (i, &l) in labels.iter().enumerate() {
        for j in 0..m {
            sums[l][j] += w[i] * data.row(i)[j];
        }
        ws[l] += w[i];
    }
    sums.into_iter()
        .zip(ws)
        .map(|(s, t)| (t > 0.0).then(|| s.iter().map(|x| x / t).collect()))
        .collect()
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn cost_of(data: &Matrix, w: &[f64], labels: &[usize], k: usize) -> f64 {
    let means = weighted_means(data, w, labels, k);
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| w[i] * sq(data.row(i), means[l].as_ref().unwrap()))
        .sum()
}

/// Minimum weighted k-means cost over all k^n labelings.
pub fn exhaustive_kmeans(data: &Matrix, w: &[f64], k: usize) -> f64 {
    let n = data.rows();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        best = best.min(cost_of(data, w, &labels, k));
        let mut i = 0;
        while i < n {
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
        if i == n {
            return best;
        }
    }
}

/// True when no point is strictly closer to another cluster's mean.
pub fn is_lloyd_fixed_point(data: &Matrix, w: &[f64], labels: &[usize], k: usize) -> bool {
    let means = weighted_means(data, w, labels, k);
    (0..data.rows()).all(|i| {
        let own = sq(data.row(i), means[labels[i]].as_ref().unwrap());
        means.iter().flatten().all(|c| sq(data.row(i), c) >= own - 1e-12)
    })
}

/// Best cost of plain Lloyd runs from `restarts` random point initializations.
pub fn best_of_random_restarts(data: &Matrix, w: &[f64], k: usize, restarts: usize, seed: u64) -> f64 {
    let n = data.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let mut picks: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = rng.random_range(i..n);
            picks.swap(i, j);
        }
        let mut centers: Vec<Vec<f64>> = picks[..k].iter().map(|&i| data.row(i).to_vec()).collect();
        let mut labels = vec![usize::MAX; n];
        for _ in 0..100 {
            let next: Vec<usize> = (0..n)
                .map(|i| {
                    (0..k)
                        .min_by(|&a, &b| sq(data.row(i), &centers[a]).total_cmp(&sq(data.row(i), &centers[b])))
                        .unwrap()
                })
                .collect();
            if next == labels {
                break;
            }
            labels = next;
            for (c, mean) in weighted_means(data, w, &labels, k).into_iter().enumerate() {
                if let Some(mean) = mean {
                    centers[c] = mean;
                }
            }
        }
        best = best.min(cost_of(data, w, &labels, k));
    }
    best
}

/// The bundled toy data, also reachable from the acceptance crate.
pub fn toy_dir() -> PathBuf {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    if here.join("data/toy").is_dir() {
        here.join("data/toy")
    } else {
        here.join("../core/data/toy")
    }
}

/// A small toy run: k-means on the bundled corpus, two seeds.
pub fn toy_config(output: PathBuf) -> RunConfig {
    let toy = toy_dir();
    RunConfig {
        corpus: toy.join("corpus.txt"),
        corpus_format: CorpusFormat::Lines,
        split_file: Some(toy.join("split.txt")),
        min_df: 2,
        embeddings: toy.join("embeddings.txt"),
        embedding_name: Some("toy".into()),
        k: 4,
        top_j: 5,
        rerank_window: 20,
        seeds: vec![0, 1],
        output,
        ..RunConfig::default()
    }
}
