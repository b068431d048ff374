//! NPMI topic coherence over held-out documents.
//!
//! Co-occurrence is boolean per window. A document longer than the window
//! contributes one window per start position (stride 1); a shorter one
//! contributes a single window; an empty one contributes nothing. Each type is
//! stored as a sorted list of the windows containing it, so a pair count is one
//! sorted intersection.
//!
//! NPMI(a, b) = ln(p_ab / (p_a p_b)) / −ln p_ab with p = window count / total
//! windows. With `epsilon == 0` a pair that never co-occurs, or involves a word
//! absent from the index, scores −1 (the ε → 0 limit of the smoothed value);
//! a positive `epsilon` is added to p_ab instead.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Split};
use crate::error::{Error, Result};
use crate::topics::{Provenance, Topic, TopicSet};

pub const DEFAULT_NPMI_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowMode {
    Sliding(usize),
    Document,
}

impl fmt::Display for WindowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowMode::Sliding(w) => write!(f, "{w}"),
            WindowMode::Document => f.write_str("document"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CooccurrenceIndex {
    mode: WindowMode,
    ids: HashMap<String, u32>,
    postings: Vec<Vec<u32>>,
    total_windows: u64,
}

impl CooccurrenceIndex {
    pub fn mode(&self) -> WindowMode {
        self.mode
    }

    pub fn total_windows(&self) -> u64 {
        self.total_windows
    }

    /// Number of distinct types seen.
    pub fn num_types(&self) -> usize {
        self.postings.len()
    }

    /// Windows containing `word`.
    pub fn unigram_count(&self, word: &str) -> u64 {
        self.ids.get(word).map_or(0, |&i| self.postings[i as usize].len() as u64)
    }

    /// Windows containing both words; symmetric.
    pub fn pair_count(&self, a: &str, b: &str) -> u64 {
        let (Some(&ia), Some(&ib)) = (self.ids.get(a), self.ids.get(b)) else {
            return 0;
        };
        intersect_len(&self.postings[ia as usize], &self.postings[ib as usize])
    }
}

fn intersect_len(a: &[u32], b: &[u32]) -> u64 {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    // Galloping pays off when the lists differ a lot in length.
    if short.len() * 16 < long.len() {
        return short.iter().filter(|x| long.binary_search(x).is_ok()).count() as u64;
    }
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < short.len() && j < long.len() {
        match short[i].cmp(&long[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Indexes the test-split documents of `docs`.
pub fn build_index(docs: &[Document], mode: WindowMode) -> Result<CooccurrenceIndex> {
    if let WindowMode::Sliding(0) = mode {
        return Err(Error::InvalidArgument("npmi window must be at least 1".into()));
    }
    let test: Vec<&Document> = docs.iter().filter(|d| d.split == Split::Test).collect();
    if test.is_empty() {
        return Err(Error::InvalidArgument("no test documents to index".into()));
    }
    let mut index = CooccurrenceIndex {
        mode,
        ids: HashMap::new(),
        postings: Vec::new(),
        total_windows: 0,
    };
    let mut window_ids = Vec::new();
    for doc in test {
        let toks: Vec<u32> = doc
            .tokens
            .iter()
            .map(|t| {
                let next = index.postings.len() as u32;
                *index.ids.entry(t.clone()).or_insert_with(|| {
                    index.postings.push(Vec::new());
                    next
                })
            })
            .collect();
        if toks.is_empty() {
            continue;
        }
        let width = match mode {
            WindowMode::Sliding(w) => w.min(toks.len()),
            WindowMode::Document => toks.len(),
        };
        for win in toks.windows(width) {
            let wid = u32::try_from(index.total_windows)
                .map_err(|_| Error::InvalidArgument("more than 2^32 co-occurrence windows".into()))?;
            window_ids.clear();
            window_ids.extend_from_slice(win);
            window_ids.sort_unstable();
            window_ids.dedup();
            for &t in &window_ids {
                index.postings[t as usize].push(wid);
            }
            index.total_windows += 1;
        }
    }
    Ok(index)
}

/// NPMI of one word pair from raw window counts; see the module docs.
pub fn pair_npmi(count_a: u64, count_b: u64, joint: u64, total: u64, epsilon: f64) -> f64 {
    if count_a == 0 || count_b == 0 || total == 0 {
        return -1.0;
    }
    let n = total as f64;
    let p_ab = joint as f64 / n + epsilon;
    if p_ab <= 0.0 {
        return -1.0;
    }
    // Perfect association is exactly 1; the float formula can land an ulp above.
    if p_ab >= 1.0 || (epsilon == 0.0 && joint == count_a && joint == count_b) {
        return 1.0;
    }
    let (p_a, p_b) = (count_a as f64 / n, count_b as f64 / n);
    (p_ab / (p_a * p_b)).ln() / -p_ab.ln()
}

/// Mean NPMI over all unordered pairs of `words`; 0 for fewer than two words.
pub fn npmi(words: &[String], index: &CooccurrenceIndex, epsilon: f64) -> f64 {
    let counts: Vec<u64> = words.iter().map(|w| index.unigram_count(w)).collect();
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            let joint = index.pair_count(&words[i], &words[j]);
            sum += pair_npmi(counts[i], counts[j], joint, index.total_windows, epsilon);
            pairs += 1;
        }
    }
    if pairs == 0 {
        0.0
    } else {
        sum / pairs as f64
    }
}

pub fn topic_npmi(topic: &Topic, index: &CooccurrenceIndex, epsilon: f64) -> f64 {
    npmi(&topic.words, index, epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedScore {
    pub seed: u64,
    pub per_topic: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpmiReport {
    /// Provenance shared by every seed; its `seed` field is the first seed.
    pub provenance: Provenance,
    pub window: WindowMode,
    pub epsilon: f64,
    pub per_seed: Vec<SeedScore>,
    pub seeds_aggregated: Vec<u64>,
    pub mean: f64,
    /// Population standard deviation of the per-seed means.
    pub std_dev: f64,
}

pub const CSV_HEADER: &str = "embedding,algorithm,weighting,reranking,pca_dim,mean,std_dev,seeds";

impl NpmiReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One results line matching [`CSV_HEADER`], without a newline.
    pub fn csv_row(&self) -> String {
        let p = &self.provenance;
        let seeds: Vec<String> = self.seeds_aggregated.iter().map(u64::to_string).collect();
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{:.6},{:.6},{}",
            csv_field(&p.embedding),
            p.algorithm,
            p.weighting,
            p.reranking,
            p.pca_dim.map_or_else(|| "full".to_string(), |d| d.to_string()),
            self.mean,
            self.std_dev,
            seeds.join(";")
        );
        s
    }
}

/// Quotes a CSV field when it contains a separator, quote or newline.
pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Scores each seed's topics and aggregates across seeds.
///
/// All sets must agree on everything in their provenance except the seed.
/// Out-of-range values are reported as errors, never clipped.
pub fn evaluate_run(sets: &[TopicSet], index: &CooccurrenceIndex, epsilon: f64) -> Result<NpmiReport> {
    let first = sets
        .first()
        .ok_or_else(|| Error::InvalidArgument("no topic sets to evaluate".into()))?;
    let mut per_seed = Vec::with_capacity(sets.len());
    for set in sets {
        if let Some(diff) = first.provenance.cell_mismatch(&set.provenance) {
            return Err(Error::ProvenanceMismatch(diff));
        }
        let per_topic: Vec<f64> = set.topics.iter().map(|t| topic_npmi(t, index, epsilon)).collect();
        if let Some(bad) = per_topic.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("npmi {bad} outside [-1, 1]")));
        }
        let mean = if per_topic.is_empty() {
            0.0
        } else {
            per_topic.iter().sum::<f64>() / per_topic.len() as f64
        };
        per_seed.push(SeedScore {
            seed: set.provenance.seed,
            per_topic,
            mean,
        });
    }
    let n = per_seed.len() as f64;
    let mean = per_seed.iter().map(|s| s.mean).sum::<f64>() / n;
    let var = per_seed.iter().map(|s| (s.mean - mean).powi(2)).sum::<f64>() / n;
    Ok(NpmiReport {
        provenance: first.provenance.clone(),
        window: index.mode,
        epsilon,
        seeds_aggregated: per_seed.iter().map(|s| s.seed).collect(),
        per_seed,
        mean,
        std_dev: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::ClusterKind;
    use crate::topics::{RerankScheme, ScoreKind};
    use crate::weighting::WeightScheme;

    fn test_doc(tokens: &[&str]) -> Document {
        Document {
            id: String::new(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            split: Split::Test,
        }
    }

    fn strings(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn whole_document_counts() {
        let idx = build_index(&[test_doc(&["a", "b"])], WindowMode::Document).unwrap();
        assert_eq!(idx.unigram_count("a"), 1);
        assert_eq!(idx.unigram_count("b"), 1);
        assert_eq!(idx.pair_count("a", "b"), 1);
        assert_eq!(idx.total_windows(), 1);
    }

    #[test]
    fn sliding_counts() {
        let idx = build_index(&[test_doc(&["a", "b", "a"])], WindowMode::Sliding(2)).unwrap();
        assert_eq!(idx.total_windows(), 2);
        assert_eq!(idx.pair_count("a", "b"), 2);
        assert_eq!(idx.pair_count("b", "a"), 2);
        assert_eq!(idx.unigram_count("a"), 2);
        // Short documents form a single window.
        let idx = build_index(&[test_doc(&["x"]), test_doc(&[])], WindowMode::Sliding(10)).unwrap();
        assert_eq!(idx.total_windows(), 1);
    }

    #[test]
    fn train_documents_are_ignored() {
        let mut d = test_doc(&["a"]);
        d.split = Split::Train;
        assert!(build_index(&[d.clone()], WindowMode::Document).is_err());
        let idx = build_index(&[d, test_doc(&["b"])], WindowMode::Document).unwrap();
        assert_eq!(idx.unigram_count("a"), 0);
    }

    #[test]
    fn perfect_association_is_one() {
        let docs = [test_doc(&["a", "b"]), test_doc(&["c"]), test_doc(&["d"])];
        let idx = build_index(&docs, WindowMode::Document).unwrap();
        assert!((npmi(&strings(&["a", "b"]), &idx, 0.0) - 1.0).abs() < 1e-12);
        for eps in [1e-3, 1e-6, 1e-9] {
            let v = npmi(&strings(&["a", "b"]), &idx, eps);
            assert!(v > 1.0 - 10.0 * eps.sqrt(), "{eps} {v}");
        }
    }

    #[test]
    fn never_together_is_minus_one() {
        let docs = [test_doc(&["a"]), test_doc(&["b"])];
        let idx = build_index(&docs, WindowMode::Document).unwrap();
        assert_eq!(npmi(&strings(&["a", "b"]), &idx, 0.0), -1.0);
        assert_eq!(npmi(&strings(&["a", "zzz"]), &idx, 0.0), -1.0);
    }

    #[test]
    fn hand_computed_three_word_topic() {
        // Windows are whole documents:
        //   {a,b,c} {a,b} {a} {c,d} {b,c}
        let docs = [
            test_doc(&["a", "b", "c"]),
            test_doc(&["a", "b"]),
            test_doc(&["a"]),
            test_doc(&["c", "d"]),
            test_doc(&["b", "c"]),
        ];
        let idx = build_index(&docs, WindowMode::Document).unwrap();
        let f = |pa: f64, pb: f64, pab: f64| (pab / (pa * pb)).ln() / -pab.ln();
        // counts a=3 b=3 c=3; ab=2 ac=1 bc=2; N=5
        let want = (f(0.6, 0.6, 0.4) + f(0.6, 0.6, 0.2) + f(0.6, 0.6, 0.4)) / 3.0;
        assert!((npmi(&strings(&["a", "b", "c"]), &idx, 0.0) - want).abs() < 1e-12);
    }

    fn prov(seed: u64) -> Provenance {
        Provenance {
            embedding: "e".into(),
            algorithm: ClusterKind::Km,
            weighting: WeightScheme::Tf,
            reranking: RerankScheme::Tf,
            rerank_window: 100,
            pca_dim: None,
            k: 1,
            top_j: 2,
            seed,
        }
    }

    fn topic_set(seed: u64, words: &[&[&str]]) -> TopicSet {
        TopicSet {
            provenance: prov(seed),
            topics: words
                .iter()
                .enumerate()
                .map(|(c, w)| Topic {
                    cluster_id: c,
                    words: strings(w),
                    indices: vec![],
                    scores: vec![],
                    score_kind: ScoreKind::Weight,
                    rerank_scheme: RerankScheme::Tf,
                })
                .collect(),
        }
    }

    #[test]
    fn aggregation_over_seeds() {
        let docs = [test_doc(&["a", "b"]), test_doc(&["c"]), test_doc(&["d"])];
        let idx = build_index(&docs, WindowMode::Document).unwrap();
        let r = evaluate_run(&[topic_set(0, &[&["a", "b"]])], &idx, 0.0).unwrap();
        assert_eq!(r.std_dev, 0.0);
        assert_eq!(r.mean, 1.0);

        let sets = [
            topic_set(0, &[&["a", "b"]]),
            topic_set(1, &[&["a", "c"]]),
            topic_set(2, &[&["a", "b"], &["c", "d"]]),
        ];
        let r = evaluate_run(&sets, &idx, 0.0).unwrap();
        assert_eq!(r.seeds_aggregated, [0, 1, 2]);
        let means = [1.0, -1.0, 0.0];
        let m = means.iter().sum::<f64>() / 3.0;
        let sd = (means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 3.0).sqrt();
        assert!((r.mean - m).abs() < 1e-12 && (r.std_dev - sd).abs() < 1e-12);
    }

    #[test]
    fn topic_order_does_not_matter() {
        let docs = [test_doc(&["a", "b", "c"]), test_doc(&["c", "d"])];
        let idx = build_index(&docs, WindowMode::Document).unwrap();
        let a = evaluate_run(&[topic_set(0, &[&["a", "b"], &["c", "d"], &["a", "d"]])], &idx, 0.0).unwrap();
        let b = evaluate_run(&[topic_set(0, &[&["a", "d"], &["a", "b"], &["c", "d"]])], &idx, 0.0).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-15);
    }

    #[test]
    fn provenance_must_match() {
        let idx = build_index(&[test_doc(&["a", "b"])], WindowMode::Document).unwrap();
        let mut other = topic_set(1, &[&["a", "b"]]);
        other.provenance.algorithm = ClusterKind::Gmm;
        assert!(matches!(
            evaluate_run(&[topic_set(0, &[&["a", "b"]]), other], &idx, 0.0),
            Err(Error::ProvenanceMismatch(_))
        ));
    }

    #[test]
    fn csv_row_layout() {
        let idx = build_index(&[test_doc(&["a", "b"])], WindowMode::Document).unwrap();
        let r = evaluate_run(&[topic_set(0, &[&["a", "b"]]), topic_set(3, &[&["a", "b"]])], &idx, 0.0).unwrap();
        assert_eq!(r.csv_row(), "e,km,tf,tf,full,1.000000,0.000000,0;3");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }

    #[test]
    fn galloping_and_merge_agree() {
        let a: Vec<u32> = (0..1000).step_by(3).collect();
        let b: Vec<u32> = vec![3, 4, 9, 999];
        let want = b.iter().filter(|x| a.contains(x)).count() as u64;
        assert_eq!(intersect_len(&a, &b), want);
        let c: Vec<u32> = (0..1000).step_by(2).collect();
        assert_eq!(intersect_len(&a, &c), (0..1000).filter(|x| x % 6 == 0).count() as u64);
    }
}
