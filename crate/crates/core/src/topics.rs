//! Top-J word lists per cluster, weight-based reranking, and topic-set overlap.
//!
//! Candidates for hard clusterings are the cluster's own members: km and kd
//! rank by squared distance to the center, sk by cosine to the center. A GMM
//! component ranks the whole vocabulary by its log-density. Reranking takes
//! the first `window` candidates of that order, stably re-sorts them by
//! descending corpus weight, and keeps J. The proximity pass costs
//! O(n_c log n_c) per cluster.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterKind, ClusterModel};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::matrix::{dot, norm, sq_dist, Matrix};
use crate::weighting::{WeightScheme, WeightVector};

pub const DEFAULT_TOP_J: usize = 10;
pub const DEFAULT_RERANK_WINDOW: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RerankScheme {
    None,
    Tf,
    TfIdf,
    TfDf,
}

impl RerankScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Tf => "tf",
            Self::TfIdf => "tf_idf",
            Self::TfDf => "tf_df",
        }
    }

    /// The weighting whose scores drive this reranking.
    pub fn weight_scheme(self) -> Option<WeightScheme> {
        match self {
            Self::None => None,
            Self::Tf => Some(WeightScheme::Tf),
            Self::TfIdf => Some(WeightScheme::TfIdf),
            Self::TfDf => Some(WeightScheme::TfDf),
        }
    }
}

impl fmt::Display for RerankScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RerankScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "tf" => Ok(Self::Tf),
            "tf_idf" | "tfidf" => Ok(Self::TfIdf),
            "tf_df" | "tfdf" => Ok(Self::TfDf),
            _ => Err(Error::InvalidArgument(format!("unknown rerank scheme {s:?}"))),
        }
    }
}

/// What a topic's `scores` measure. Best-first means ascending for
/// `SquaredDistance` and descending for the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    SquaredDistance,
    Cosine,
    LogDensity,
    Weight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topic {
    pub cluster_id: usize,
    pub words: Vec<String>,
    /// Row indices of `words` in the working vocabulary.
    pub indices: Vec<usize>,
    pub scores: Vec<f64>,
    pub score_kind: ScoreKind,
    pub rerank_scheme: RerankScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub embedding: String,
    pub algorithm: ClusterKind,
    pub weighting: WeightScheme,
    pub reranking: RerankScheme,
    pub rerank_window: usize,
    pub pca_dim: Option<usize>,
    pub k: usize,
    pub top_j: usize,
    pub seed: u64,
}

impl Provenance {
    /// Differences other than the seed, or `None` if there are none.
    pub fn cell_mismatch(&self, other: &Provenance) -> Option<String> {
        let a = Provenance { seed: 0, ..self.clone() };
        let b = Provenance { seed: 0, ..other.clone() };
        (a != b).then(|| format!("{a:?} vs {b:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSet {
    pub provenance: Provenance,
    pub topics: Vec<Topic>,
}

impl TopicSet {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One line per topic, words separated by single spaces.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.topics {
            let _ = writeln!(s, "{}", t.words.join(" "));
        }
        s
    }
}

/// `(row, score)` candidates, best first.
pub type Ranking = Vec<(usize, f64)>;

/// Every candidate of `cluster`, best first, with its proximity score.
/// Equal scores keep ascending row order.
pub fn rank_candidates(model: &ClusterModel, data: &Matrix, cluster: usize) -> Result<(Vec<(usize, f64)>, ScoreKind)> {
    let (mut all, kind) = rank_all(model, data)?;
    Ok((all.swap_remove(cluster), kind))
}

/// [`rank_candidates`] for every cluster at once. GMM densities are evaluated
/// in a single pass over the vocabulary.
pub fn rank_all(model: &ClusterModel, data: &Matrix) -> Result<(Vec<Ranking>, ScoreKind)> {
    if data.cols() != model.dim() {
        return Err(Error::DimensionMismatch {
            location: "topic extraction".into(),
            expected: model.dim(),
            found: data.cols(),
        });
    }
    let (mut ranked, kind): (Vec<Vec<(usize, f64)>>, ScoreKind) = match model.kind {
        ClusterKind::Km | ClusterKind::Kd => {
            let r = model
                .members()
                .into_iter()
                .enumerate()
                .map(|(c, members)| {
                    let center = model.centroids.row(c);
                    members.into_iter().map(|i| (i, sq_dist(data.row(i), center))).collect()
                })
                .collect();
            (r, ScoreKind::SquaredDistance)
        }
        ClusterKind::Sk => {
            // Centers are unit vectors, so dividing by ‖x‖ gives the cosine.
            let r = model
                .members()
                .into_iter()
                .enumerate()
                .map(|(c, members)| {
                    let center = model.centroids.row(c);
                    members
                        .into_iter()
                        .map(|i| {
                            let x = data.row(i);
                            (i, dot(x, center) / norm(x).max(f64::MIN_POSITIVE))
                        })
                        .collect()
                })
                .collect();
            (r, ScoreKind::Cosine)
        }
        ClusterKind::Gmm => {
            let gp = model
                .gmm
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("gmm model without mixture parameters".into()))?;
            let dens = gp.component_log_densities(data)?;
            let r = (0..model.k)
                .map(|c| (0..data.rows()).map(|i| (i, dens.row(i)[c])).collect())
                .collect();
            (r, ScoreKind::LogDensity)
        }
    };
    for list in &mut ranked {
        match kind {
            ScoreKind::SquaredDistance => list.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))),
            _ => list.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))),
        }
    }
    Ok((ranked, kind))
}

fn check_j(j: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::InvalidArgument("J must be at least 1".into()));
    }
    Ok(())
}

fn make_topic(vocab: &Vocabulary, cluster_id: usize, picked: &[(usize, f64)], score_kind: ScoreKind, rerank_scheme: RerankScheme) -> Topic {
    Topic {
        cluster_id,
        words: picked.iter().map(|&(i, _)| vocab.word(i).to_string()).collect(),
        indices: picked.iter().map(|&(i, _)| i).collect(),
        scores: picked.iter().map(|&(_, s)| s).collect(),
        score_kind,
        rerank_scheme,
    }
}

/// The J best candidates of every cluster by proximity (or density).
///
/// `data` must be the matrix the model was fitted on, with rows aligned to
/// `vocab`. Clusters with fewer than J members report all of them.
pub fn extract_top_j(
    model: &ClusterModel,
    data: &Matrix,
    vocab: &Vocabulary,
    j: usize,
    provenance: Provenance,
) -> Result<TopicSet> {
    check_j(j)?;
    check_rows(data, vocab)?;
    let (all, kind) = rank_all(model, data)?;
    let topics = all
        .iter()
        .enumerate()
        .map(|(c, ranked)| make_topic(vocab, c, &ranked[..j.min(ranked.len())], kind, RerankScheme::None))
        .collect();
    Ok(TopicSet {
        provenance: Provenance {
            reranking: RerankScheme::None,
            top_j: j,
            k: model.k,
            ..provenance
        },
        topics,
    })
}

fn check_rows(data: &Matrix, vocab: &Vocabulary) -> Result<()> {
    if data.rows() != vocab.len() {
        return Err(Error::DimensionMismatch {
            location: "topic extraction rows".into(),
            expected: vocab.len(),
            found: data.rows(),
        });
    }
    Ok(())
}

/// Reorders the first `window` entries of a best-first candidate list by
/// descending weight, keeping proximity order among equal weights, and returns
/// the first `j` with their weights as scores.
pub fn rerank_candidates(ranked: &[(usize, f64)], weights: &[f64], window: usize, j: usize) -> Vec<(usize, f64)> {
    let mut pool: Vec<(usize, f64)> = ranked[..window.min(ranked.len())]
        .iter()
        .map(|&(i, _)| (i, weights[i]))
        .collect();
    // Stable sort: ties keep their proximity rank.
    pool.sort_by(|a, b| b.1.total_cmp(&a.1));
    pool.truncate(j);
    pool
}

/// Reranks every cluster of `model` by `weights`. `scheme` names the weighting
/// for provenance and must match `weights.scheme`.
#[allow(clippy::too_many_arguments)]
pub fn rerank(
    model: &ClusterModel,
    data: &Matrix,
    vocab: &Vocabulary,
    weights: &WeightVector,
    scheme: RerankScheme,
    window: usize,
    j: usize,
    provenance: Provenance,
) -> Result<TopicSet> {
    check_j(j)?;
    check_rows(data, vocab)?;
    if window < j {
        return Err(Error::InvalidArgument(format!("rerank window {window} is smaller than J={j}")));
    }
    if scheme.weight_scheme() != Some(weights.scheme) {
        return Err(Error::InvalidArgument(format!(
            "rerank scheme {scheme} given {} weights",
            weights.scheme
        )));
    }
    if weights.len() != vocab.len() {
        return Err(Error::DimensionMismatch {
            location: "rerank weights".into(),
            expected: vocab.len(),
            found: weights.len(),
        });
    }
    let (all, _) = rank_all(model, data)?;
    let topics = all
        .iter()
        .enumerate()
        .map(|(c, ranked)| {
            let picked = rerank_candidates(ranked, &weights.weights, window, j);
            make_topic(vocab, c, &picked, ScoreKind::Weight, scheme)
        })
        .collect();
    Ok(TopicSet {
        provenance: Provenance {
            reranking: scheme,
            rerank_window: window,
            top_j: j,
            k: model.k,
            ..provenance
        },
        topics,
    })
}

/// Per-topic Jaccard similarity of word sets (matched by cluster id) and their mean.
pub fn jaccard(a: &TopicSet, b: &TopicSet) -> Result<(Vec<f64>, f64)> {
    if a.topics.len() != b.topics.len() {
        return Err(Error::MismatchedK {
            left: a.topics.len(),
            right: b.topics.len(),
        });
    }
    let mut per = Vec::with_capacity(a.topics.len());
    for ta in &a.topics {
        let tb = b
            .topics
            .iter()
            .find(|t| t.cluster_id == ta.cluster_id)
            .ok_or_else(|| Error::InvalidArgument(format!("cluster {} missing from second set", ta.cluster_id)))?;
        let sa: std::collections::BTreeSet<&str> = ta.words.iter().map(String::as_str).collect();
        let sb: std::collections::BTreeSet<&str> = tb.words.iter().map(String::as_str).collect();
        let union = sa.union(&sb).count();
        let inter = sa.intersection(&sb).count();
        per.push(if union == 0 { 1.0 } else { inter as f64 / union as f64 });
    }
    let mean = if per.is_empty() { 0.0 } else { per.iter().sum::<f64>() / per.len() as f64 };
    Ok((per, mean))
}
