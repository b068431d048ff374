//! Run configuration and its `key = value` file format.
//!
//! One setting per line; `#` starts a comment, blank lines are skipped, keys
//! are the [`RunConfig`] field names. Lists are comma separated and seeds also
//! accept an inclusive range `a..b`. Later assignments override earlier ones,
//! so applying defaults, then a file, then command-line pairs gives the usual
//! precedence.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::clustering::ClusterKind;
use crate::corpus::DEFAULT_MIN_DF;
use crate::embeddings::EmbeddingFormat;
use crate::error::{Error, Result};
use crate::evaluation::{WindowMode, DEFAULT_NPMI_WINDOW};
use crate::topics::{RerankScheme, DEFAULT_RERANK_WINDOW, DEFAULT_TOP_J};
use crate::weighting::WeightScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorpusFormat {
    /// `20news-bydate-train/` and `20news-bydate-test/` under the corpus path.
    Bydate,
    /// One document per line plus a file of 1-based test line numbers.
    Lines,
}

impl CorpusFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Bydate => "bydate",
            Self::Lines => "lines",
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bydate" | "20ng" => Ok(Self::Bydate),
            "lines" => Ok(Self::Lines),
            _ => Err(Error::Config(format!("unknown corpus format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub corpus_format: CorpusFormat,
    pub split_file: Option<PathBuf>,
    /// `None` uses the bundled English list.
    pub stopwords: Option<PathBuf>,
    pub min_df: u32,
    pub embeddings: PathBuf,
    pub embedding_format: EmbeddingFormat,
    /// Label in provenance and results; defaults to the embedding file stem.
    pub embedding_name: Option<String>,
    pub algorithm: ClusterKind,
    pub k: usize,
    pub top_j: usize,
    pub weighting: WeightScheme,
    pub reranking: RerankScheme,
    pub rerank_window: usize,
    pub pca_dim: Option<usize>,
    pub seeds: Vec<u64>,
    pub npmi_window: WindowMode,
    pub epsilon: f64,
    pub max_iter: usize,
    /// `None` uses the algorithm's default tolerance.
    pub tol: Option<f64>,
    pub reg: Option<f64>,
    pub threads: usize,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: PathBuf::new(),
            corpus_format: CorpusFormat::Bydate,
            split_file: None,
            stopwords: None,
            min_df: DEFAULT_MIN_DF,
            embeddings: PathBuf::new(),
            embedding_format: EmbeddingFormat::GloveText,
            embedding_name: None,
            algorithm: ClusterKind::Km,
            k: 20,
            top_j: DEFAULT_TOP_J,
            weighting: WeightScheme::Uniform,
            reranking: RerankScheme::None,
            rerank_window: DEFAULT_RERANK_WINDOW,
            pca_dim: None,
            seeds: (0..5).collect(),
            npmi_window: WindowMode::Sliding(DEFAULT_NPMI_WINDOW),
            epsilon: 0.0,
            max_iter: 300,
            tol: None,
            reg: None,
            threads: 1,
            output: PathBuf::from("out"),
        }
    }
}

/// Every key [`RunConfig::set`] accepts.
pub const KEYS: &[&str] = &[
    "corpus",
    "corpus_format",
    "split_file",
    "stopwords",
    "min_df",
    "embeddings",
    "embedding_format",
    "embedding_name",
    "algorithm",
    "k",
    "top_j",
    "weighting",
    "reranking",
    "rerank_window",
    "pca_dim",
    "seeds",
    "npmi_window",
    "epsilon",
    "max_iter",
    "tol",
    "reg",
    "threads",
    "output",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn optional(v: &str) -> Option<&str> {
    match v {
        "" | "none" | "full" | "default" => None,
        _ => Some(v),
    }
}

fn retag(e: Error, key: &str) -> Error {
    match e {
        Error::InvalidArgument(m) | Error::Config(m) => Error::Config(format!("{key}: {m}")),
        other => other,
    }
}

pub fn parse_seeds(v: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (u64, u64) = (num("seeds", a.trim())?, num("seeds", b.trim())?);
        if a > b {
            return Err(Error::Config(format!("seeds: empty range {v:?}")));
        }
        return Ok((a..=b).collect());
    }
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num("seeds", s))
        .collect()
}

impl RunConfig {
    /// Parses a config file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut c = RunConfig::default();
        c.apply_text(&text)?;
        Ok(c)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split_once('#').map_or(line, |(a, _)| a).trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "corpus" => self.corpus = PathBuf::from(v),
            "corpus_format" => self.corpus_format = v.parse()?,
            "split_file" => self.split_file = optional(v).map(PathBuf::from),
            "stopwords" => self.stopwords = optional(v).map(PathBuf::from),
            "min_df" => self.min_df = num(key, v)?,
            "embeddings" => self.embeddings = PathBuf::from(v),
            "embedding_format" => self.embedding_format = v.parse().map_err(|e| retag(e, key))?,
            "embedding_name" => self.embedding_name = optional(v).map(str::to_string),
            "algorithm" => self.algorithm = v.parse().map_err(|e| retag(e, key))?,
            "k" => self.k = num(key, v)?,
            "top_j" | "j" => self.top_j = num(key, v)?,
            "weighting" => self.weighting = v.parse().map_err(|e| retag(e, key))?,
            "reranking" => self.reranking = v.parse().map_err(|e| retag(e, key))?,
            "rerank_window" => self.rerank_window = num(key, v)?,
            "pca_dim" => self.pca_dim = optional(v).map(|d| num(key, d)).transpose()?,
            "seeds" => self.seeds = parse_seeds(v)?,
            "npmi_window" => {
                self.npmi_window = match v {
                    "document" | "doc" => WindowMode::Document,
                    _ => WindowMode::Sliding(num(key, v)?),
                }
            }
            "epsilon" => self.epsilon = num(key, v)?,
            "max_iter" => self.max_iter = num(key, v)?,
            "tol" => self.tol = optional(v).map(|t| num(key, t)).transpose()?,
            "reg" => self.reg = optional(v).map(|t| num(key, t)).transpose()?,
            "threads" => self.threads = num(key, v)?,
            "output" => self.output = PathBuf::from(v),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.corpus.as_os_str().is_empty() {
            return fail("corpus is not set".into());
        }
        if self.embeddings.as_os_str().is_empty() {
            return fail("embeddings is not set".into());
        }
        if self.corpus_format == CorpusFormat::Lines && self.split_file.is_none() {
            return fail("corpus_format = lines needs split_file".into());
        }
        if self.k == 0 {
            return fail("k must be at least 1".into());
        }
        if self.top_j == 0 {
            return fail("top_j must be at least 1".into());
        }
        if self.rerank_window < self.top_j {
            return fail(format!(
                "rerank_window ({}) must be at least top_j ({})",
                self.rerank_window, self.top_j
            ));
        }
        if self.seeds.is_empty() {
            return fail("seeds is empty".into());
        }
        if self.npmi_window == WindowMode::Sliding(0) {
            return fail("npmi_window must be at least 1".into());
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return fail(format!("epsilon must lie in [0, 1), got {}", self.epsilon));
        }
        if self.pca_dim == Some(0) {
            return fail("pca_dim must be at least 1".into());
        }
        if self.threads == 0 {
            return fail("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn embedding_label(&self) -> String {
        self.embedding_name.clone().unwrap_or_else(|| {
            self.embeddings
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
    }

    /// The configuration in file syntax; parsing it back gives `self`.
    pub fn to_text(&self) -> String {
        let opt_path = |p: &Option<PathBuf>| p.as_ref().map_or("none".to_string(), |p| p.display().to_string());
        let opt = |x: Option<String>| x.unwrap_or_else(|| "none".into());
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("corpus", self.corpus.display().to_string());
        put("corpus_format", self.corpus_format.as_str().into());
        put("split_file", opt_path(&self.split_file));
        put("stopwords", opt_path(&self.stopwords));
        put("min_df", self.min_df.to_string());
        put("embeddings", self.embeddings.display().to_string());
        put("embedding_format", self.embedding_format.as_str().into());
        put("embedding_name", opt(self.embedding_name.clone()));
        put("algorithm", self.algorithm.to_string());
        put("k", self.k.to_string());
        put("top_j", self.top_j.to_string());
        put("weighting", self.weighting.to_string());
        put("reranking", self.reranking.to_string());
        put("rerank_window", self.rerank_window.to_string());
        put("pca_dim", opt(self.pca_dim.map(|d| d.to_string())));
        put("seeds", seeds.join(","));
        put(
            "npmi_window",
            match self.npmi_window {
                WindowMode::Sliding(w) => w.to_string(),
                WindowMode::Document => "document".into(),
            },
        );
        put("epsilon", self.epsilon.to_string());
        put("max_iter", self.max_iter.to_string());
        put("tol", opt(self.tol.map(|t| t.to_string())));
        put("reg", opt(self.reg.map(|t| t.to_string())));
        put("threads", self.threads.to_string());
        put("output", self.output.display().to_string());
        s
    }
}
