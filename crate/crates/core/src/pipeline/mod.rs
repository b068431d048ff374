//! End-to-end runs: corpus → vocabulary → embeddings (→ PCA) → weights →
//! clustering → top-J (→ rerank) → NPMI, for every seed.
//!
//! Everything a run writes lives under `config.output`:
//!
//! ```text
//! config.txt           resolved configuration
//! vocab.tsv            working vocabulary (types with vectors)
//! models/<seed>.model  fitted models
//! topics/<seed>.json   topic sets with provenance and scores
//! topics/<seed>.txt    one topic per line
//! report.json          NPMI report
//! results.csv          one results row
//! ```
//!
//! Outputs depend only on the configuration and input files, so repeating a
//! run reproduces every byte.

mod cache;
mod config;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub use cache::{Cache, CorpusData, LoadedEmbeddings};
pub use config::{parse_seeds, CorpusFormat, RunConfig, KEYS};
pub use sweep::{sweep, SweepAxis, SWEEP_CSV_HEADER};

use crate::clustering::{fit, read_model, write_model, ClusterKind, ClusterModel, FitParams};
use crate::corpus::{build_vocabulary, load_20ng, load_lines, Stopwords};
use crate::embeddings::{load_embeddings, normalize_rows, pca_reduce, EmbeddingTable};
use crate::error::{Error, Result};
use crate::evaluation::{build_index, evaluate_run, CooccurrenceIndex, NpmiReport, CSV_HEADER};
use crate::matrix::Matrix;
use crate::topics::{extract_top_j, rerank, Provenance, RerankScheme, TopicSet};
use crate::weighting::{compute_weights, WeightScheme, WeightVector};

/// Inputs shared by every seed of a run.
pub struct Prepared {
    pub corpus: Arc<CorpusData>,
    pub embeddings: Arc<LoadedEmbeddings>,
    /// After the optional PCA step.
    pub table: EmbeddingTable,
    /// What the clustering sees: `table`, unit-normalized for sk.
    pub data: Matrix,
    pub cluster_weights: Option<WeightVector>,
    pub rerank_weights: Option<WeightVector>,
}

impl Prepared {
    /// The working vocabulary, aligned with `data` rows.
    pub fn vocab(&self) -> &crate::corpus::Vocabulary {
        &self.embeddings.vocab
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: NpmiReport,
    pub topic_sets: Vec<TopicSet>,
    pub coverage: f64,
    pub vocab_size: usize,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn model_path(output: &Path, seed: u64) -> PathBuf {
    output.join("models").join(format!("{seed}.model"))
}

pub fn topics_path(output: &Path, seed: u64) -> PathBuf {
    output.join("topics").join(format!("{seed}.json"))
}

fn stopwords(cfg: &RunConfig) -> Result<Stopwords> {
    match &cfg.stopwords {
        Some(p) => Stopwords::from_file(p),
        None => Ok(Stopwords::english()),
    }
}

/// Tokenized corpus and train vocabulary.
pub fn load_corpus(cfg: &RunConfig, cache: &mut Cache) -> Result<Arc<CorpusData>> {
    load_corpus_inner(cfg, cache).map_err(|e| e.in_stage(format!("corpus {}", cfg.corpus.display())))
}

fn load_corpus_inner(cfg: &RunConfig, cache: &mut Cache) -> Result<Arc<CorpusData>> {
    let key = if cache.is_enabled() { Some(corpus_key(cfg, cache)?) } else { None };
    let enabled = cache.is_enabled();
    Cache::get_or(enabled, &mut cache.corpora, key, || {
        let sw = stopwords(cfg)?;
        let docs = match cfg.corpus_format {
            CorpusFormat::Bydate => load_20ng(&cfg.corpus, &sw)?,
            CorpusFormat::Lines => {
                let split = cfg
                    .split_file
                    .as_deref()
                    .ok_or_else(|| Error::Config("corpus_format = lines needs split_file".into()))?;
                load_lines(&cfg.corpus, split, &sw)?
            }
        };
        let vocab = build_vocabulary(&docs, cfg.min_df)?;
        Ok(CorpusData { docs, vocab })
    })
}

fn load_vectors(cfg: &RunConfig, corpus: &CorpusData, corpus_key: Option<&str>, cache: &mut Cache) -> Result<Arc<LoadedEmbeddings>> {
    load_vectors_inner(cfg, corpus, corpus_key, cache)
        .map_err(|e| e.in_stage(format!("embeddings {}", cfg.embeddings.display())))
}

fn load_vectors_inner(cfg: &RunConfig, corpus: &CorpusData, corpus_key: Option<&str>, cache: &mut Cache) -> Result<Arc<LoadedEmbeddings>> {
    let label = cfg.embedding_label();
    let key = match corpus_key {
        Some(ck) => Some(cache::key(&[
            ck,
            &cache.digest_path(&cfg.embeddings)?,
            cfg.embedding_format.as_str(),
            &label,
        ])),
        None => None,
    };
    let enabled = cache.is_enabled();
    Cache::get_or(enabled, &mut cache.embeddings, key, || {
        let (table, vocab) = load_embeddings(&cfg.embeddings, cfg.embedding_format, &corpus.vocab, &label)?;
        if vocab.is_empty() {
            return Err(Error::InvalidArgument("no vocabulary type has a vector".into()));
        }
        Ok(LoadedEmbeddings { table, vocab })
    })
}

/// Co-occurrence index over the test split.
pub fn load_index(cfg: &RunConfig, cache: &mut Cache) -> Result<Arc<CooccurrenceIndex>> {
    let corpus = load_corpus(cfg, cache)?;
    let key = if cache.is_enabled() {
        Some(cache::key(&[&corpus_key(cfg, cache)?, &format!("{:?}", cfg.npmi_window)]))
    } else {
        None
    };
    let enabled = cache.is_enabled();
    Cache::get_or(enabled, &mut cache.indices, key, || build_index(&corpus.docs, cfg.npmi_window))
        .map_err(|e| e.in_stage("npmi index"))
}

fn corpus_key(cfg: &RunConfig, cache: &mut Cache) -> Result<String> {
    Ok(cache::key(&[
        &cache.digest_path(&cfg.corpus)?,
        cfg.corpus_format.as_str(),
        &match &cfg.split_file {
            Some(p) => cache.digest_path(p)?,
            None => String::new(),
        },
        &match &cfg.stopwords {
            Some(p) => cache.digest_path(p)?,
            None => "bundled".into(),
        },
        &cfg.min_df.to_string(),
    ]))
}

/// Loads and transforms everything the per-seed fits share.
pub fn prepare(cfg: &RunConfig, cache: &mut Cache) -> Result<Prepared> {
    cfg.validate()?;
    let corpus = load_corpus(cfg, cache)?;
    let ck = if cache.is_enabled() {
        Some(corpus_key(cfg, cache).map_err(|e| e.in_stage("corpus digest"))?)
    } else {
        None
    };
    let embeddings = load_vectors(cfg, &corpus, ck.as_deref(), cache)?;
    let table = match cfg.pca_dim {
        Some(d) => pca_reduce(&embeddings.table, d).map_err(|e| e.in_stage(format!("pca to {d} dimensions")))?,
        None => embeddings.table.clone(),
    };
    let data = if cfg.algorithm == ClusterKind::Sk {
        normalize_rows(&table).map_err(|e| e.in_stage("normalization"))?.vectors
    } else {
        table.vectors.clone()
    };
    let weights = |scheme: WeightScheme| compute_weights(scheme, &embeddings.vocab, &corpus.vocab, &corpus.docs);
    let cluster_weights = (cfg.weighting != WeightScheme::Uniform).then(|| weights(cfg.weighting));
    let rerank_weights = cfg.reranking.weight_scheme().map(weights);
    Ok(Prepared {
        corpus,
        embeddings,
        table,
        data,
        cluster_weights,
        rerank_weights,
    })
}

pub fn fit_params(cfg: &RunConfig, seed: u64) -> FitParams {
    let mut p = FitParams::for_kind(cfg.algorithm, cfg.k, seed);
    p.max_iter = cfg.max_iter;
    if let Some(t) = cfg.tol {
        p.tol = t;
    }
    p.reg = cfg.reg;
    p.threads = cfg.threads;
    p
}

pub fn fit_seed(cfg: &RunConfig, prep: &Prepared, seed: u64) -> Result<ClusterModel> {
    let w = prep.cluster_weights.as_ref().map(|w| w.weights.as_slice());
    fit(cfg.algorithm, &prep.data, w, &fit_params(cfg, seed))
        .map_err(|e| e.in_stage(format!("{} fit, seed {seed}", cfg.algorithm)))
}

pub fn provenance(cfg: &RunConfig, seed: u64) -> Provenance {
    Provenance {
        embedding: cfg.embedding_label(),
        algorithm: cfg.algorithm,
        weighting: cfg.weighting,
        reranking: cfg.reranking,
        rerank_window: if cfg.reranking == RerankScheme::None { 0 } else { cfg.rerank_window },
        pca_dim: cfg.pca_dim,
        k: cfg.k,
        top_j: cfg.top_j,
        seed,
    }
}

pub fn topics_for(cfg: &RunConfig, prep: &Prepared, model: &ClusterModel) -> Result<TopicSet> {
    let prov = provenance(cfg, model.seed);
    match &prep.rerank_weights {
        None => extract_top_j(model, &prep.data, prep.vocab(), cfg.top_j, prov),
        Some(w) => rerank(model, &prep.data, prep.vocab(), w, cfg.reranking, cfg.rerank_window, cfg.top_j, prov),
    }
    .map_err(|e| e.in_stage(format!("topics, seed {}", model.seed)))
}

/// Writes the tokenized documents (`documents.jsonl`) and the train
/// vocabulary before embedding filtering (`corpus_vocab.tsv`).
pub fn preprocess(cfg: &RunConfig, cache: &mut Cache) -> Result<Arc<CorpusData>> {
    if cfg.corpus.as_os_str().is_empty() {
        return Err(Error::Config("corpus is not set".into()));
    }
    let corpus = load_corpus(cfg, cache)?;
    let mut lines = String::new();
    for d in &corpus.docs {
        lines.push_str(&serde_json::to_string(d)?);
        lines.push('\n');
    }
    write(&cfg.output.join("documents.jsonl"), lines)?;
    write(&cfg.output.join("corpus_vocab.tsv"), corpus.vocab.to_tsv())?;
    Ok(corpus)
}

fn write_common(cfg: &RunConfig, prep: &Prepared) -> Result<()> {
    write(&cfg.output.join("config.txt"), cfg.to_text())?;
    write(&cfg.output.join("vocab.tsv"), prep.vocab().to_tsv())
}

fn save_model(cfg: &RunConfig, model: &ClusterModel) -> Result<()> {
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    write(&model_path(&cfg.output, model.seed), buf)
}

fn save_topics(cfg: &RunConfig, set: &TopicSet) -> Result<()> {
    let seed = set.provenance.seed;
    write(&topics_path(&cfg.output, seed), set.to_json()?)?;
    write(&cfg.output.join("topics").join(format!("{seed}.txt")), set.to_text())
}

fn save_report(cfg: &RunConfig, report: &NpmiReport) -> Result<()> {
    write(&cfg.output.join("report.json"), report.to_json()?)?;
    write(&cfg.output.join("results.csv"), format!("{CSV_HEADER}\n{}\n", report.csv_row()))
}

/// Fits every seed and writes `models/`.
pub fn fit_stage(cfg: &RunConfig, cache: &mut Cache) -> Result<Vec<ClusterModel>> {
    let prep = prepare(cfg, cache)?;
    write_common(cfg, &prep)?;
    cfg.seeds
        .iter()
        .map(|&s| {
            let m = fit_seed(cfg, &prep, s)?;
            save_model(cfg, &m)?;
            Ok(m)
        })
        .collect()
}

/// Reads `models/` and writes `topics/`.
pub fn topics_stage(cfg: &RunConfig, cache: &mut Cache) -> Result<Vec<TopicSet>> {
    let prep = prepare(cfg, cache)?;
    cfg.seeds
        .iter()
        .map(|&s| {
            let path = model_path(&cfg.output, s);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let model = read_model(&mut bytes.as_slice()).map_err(|e| e.in_stage(format!("model {}", path.display())))?;
            if model.kind != cfg.algorithm || model.k != cfg.k || model.dim() != prep.data.cols() {
                return Err(Error::Config(format!(
                    "{} was fitted with a different algorithm, k or dimension",
                    path.display()
                )));
            }
            let set = topics_for(cfg, &prep, &model)?;
            save_topics(cfg, &set)?;
            Ok(set)
        })
        .collect()
}

/// Reads `topics/`, scores them and writes the report.
pub fn eval_stage(cfg: &RunConfig, cache: &mut Cache) -> Result<NpmiReport> {
    cfg.validate()?;
    let sets = cfg
        .seeds
        .iter()
        .map(|&s| {
            let path = topics_path(&cfg.output, s);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            TopicSet::from_json(&text)
        })
        .collect::<Result<Vec<_>>>()?;
    let index = load_index(cfg, cache)?;
    let report = evaluate_run(&sets, &index, cfg.epsilon).map_err(|e| e.in_stage("evaluation"))?;
    save_report(cfg, &report)?;
    Ok(report)
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    run_with_cache(cfg, &mut Cache::new())
}

pub fn run_with_cache(cfg: &RunConfig, cache: &mut Cache) -> Result<RunOutput> {
    let prep = prepare(cfg, cache)?;
    write_common(cfg, &prep)?;
    let mut sets = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let model = fit_seed(cfg, &prep, seed)?;
        save_model(cfg, &model)?;
        let set = topics_for(cfg, &prep, &model)?;
        save_topics(cfg, &set)?;
        sets.push(set);
    }
    let index = load_index(cfg, cache)?;
    let report = evaluate_run(&sets, &index, cfg.epsilon).map_err(|e| e.in_stage("evaluation"))?;
    save_report(cfg, &report)?;
    Ok(RunOutput {
        report,
        topic_sets: sets,
        coverage: prep.embeddings.table.coverage,
        vocab_size: prep.vocab().len(),
    })
}
