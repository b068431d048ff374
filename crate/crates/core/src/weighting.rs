//! Per-type corpus scores used to weight clustering and to rerank top words.
//!
//! All schemes are computed from training-split counts:
//!
//! * `tf`     = f_t / N, with N the total token count of the corpus vocabulary
//! * `tf_df`  = tf · df_t / |D|
//! * `tf_idf` = Σ_d (f_{t,d} / |d|) · ln(|D| / (df_t + 1)), clamped at 0
//! * `uniform` gives every type weight 1.
//!
//! Weights are never renormalized after a vocabulary is narrowed to the types
//! that have embeddings.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Split, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    Uniform,
    Tf,
    TfIdf,
    TfDf,
}

impl WeightScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Tf => "tf",
            Self::TfIdf => "tf_idf",
            Self::TfDf => "tf_df",
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "none" => Ok(Self::Uniform),
            "tf" => Ok(Self::Tf),
            "tf_idf" | "tfidf" => Ok(Self::TfIdf),
            "tf_df" | "tfdf" => Ok(Self::TfDf),
            _ => Err(Error::InvalidArgument(format!("unknown weight scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub scheme: WeightScheme,
    pub weights: Vec<f64>,
}

impl WeightVector {
    pub fn uniform(n: usize) -> Self {
        WeightVector {
            scheme: WeightScheme::Uniform,
            weights: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `type<TAB>weight` per line, in vocabulary order.
    pub fn to_tsv(&self, vocab: &Vocabulary) -> String {
        let mut s = String::new();
        for (t, w) in vocab.types().iter().zip(&self.weights) {
            let _ = writeln!(s, "{t}\t{w}");
        }
        s
    }
}

pub fn tf_weights(vocab: &Vocabulary) -> WeightVector {
    let total = vocab.total_tokens() as f64;
    WeightVector {
        scheme: WeightScheme::Tf,
        weights: vocab.term_freq().iter().map(|&f| f as f64 / total).collect(),
    }
}

pub fn tf_df_weights(vocab: &Vocabulary) -> WeightVector {
    let mut w = tf_weights(vocab);
    let d = vocab.num_docs() as f64;
    for (x, &df) in w.weights.iter_mut().zip(vocab.doc_freq()) {
        *x *= df as f64 / d;
    }
    w.scheme = WeightScheme::TfDf;
    w
}

/// Per-type sums of document-normalized term frequencies, Σ_d f_{t,d}/|d|,
/// over training documents. `|d|` counts only tokens in the corpus vocabulary.
#[derive(Debug, Clone, Default)]
pub struct PerDocTf(HashMap<String, f64>);

impl PerDocTf {
    pub fn from_documents(corpus_vocab: &Vocabulary, docs: &[Document]) -> Self {
        let mut sums = HashMap::new();
        for doc in docs.iter().filter(|d| d.split == Split::Train) {
            let mut counts: HashMap<&str, u32> = HashMap::new();
            let mut len = 0u32;
            for t in &doc.tokens {
                if corpus_vocab.index_of(t).is_some() {
                    *counts.entry(t.as_str()).or_default() += 1;
                    len += 1;
                }
            }
            // Sort so that floating-point accumulation order is fixed.
            let mut counts: Vec<_> = counts.into_iter().collect();
            counts.sort_unstable();
            for (t, c) in counts {
                *sums.entry(t.to_string()).or_insert(0.0) += c as f64 / len as f64;
            }
        }
        PerDocTf(sums)
    }

    pub fn get(&self, word: &str) -> f64 {
        self.0.get(word).copied().unwrap_or(0.0)
    }
}

pub fn tf_idf_weights(vocab: &Vocabulary, per_doc_tf: &PerDocTf) -> WeightVector {
    let d = vocab.num_docs() as f64;
    let weights = vocab
        .types()
        .iter()
        .zip(vocab.doc_freq())
        .map(|(t, &df)| {
            let idf = (d / (df as f64 + 1.0)).ln();
            (per_doc_tf.get(t) * idf).max(0.0)
        })
        .collect();
    WeightVector {
        scheme: WeightScheme::TfIdf,
        weights,
    }
}

/// Computes `scheme` for `vocab`; `docs` is only consulted for tf-idf.
pub fn compute_weights(
    scheme: WeightScheme,
    vocab: &Vocabulary,
    corpus_vocab: &Vocabulary,
    docs: &[Document],
) -> WeightVector {
    match scheme {
        WeightScheme::Uniform => WeightVector::uniform(vocab.len()),
        WeightScheme::Tf => tf_weights(vocab),
        WeightScheme::TfDf => tf_df_weights(vocab),
        WeightScheme::TfIdf => tf_idf_weights(vocab, &PerDocTf::from_documents(corpus_vocab, docs)),
    }
}
