//! Command-line front end. Every subcommand takes `--config FILE` plus flags
//! named after the config keys; flags override the file, which overrides the
//! defaults. Failures print one JSON object on stderr and exit with status 1.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use embtopics::bench::{bench_scaling, to_csv, BenchAxis, BenchBase};
use embtopics::pipeline::{self, Cache, RunConfig, SweepAxis};
use embtopics::{ClusterKind, Error, Result};

#[derive(Parser)]
#[command(name = "embtopics", version, about = "Topic models from clustered word embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize the corpus; writes documents.jsonl and corpus_vocab.tsv.
    Preprocess(ConfigArgs),
    /// Fit one model per seed; writes vocab.tsv and models/.
    Fit(ConfigArgs),
    /// Extract (and rerank) topics from models/; writes topics/.
    Topics(ConfigArgs),
    /// Score topics/ by NPMI on the test split; writes report.json and results.csv.
    Eval(ConfigArgs),
    /// All stages for every seed.
    Run(ConfigArgs),
    /// One run per value along an axis; writes sweep_<axis>.csv.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// pca_dims, algorithms, weight_schemes or rerank_schemes.
        #[arg(long)]
        axis: String,
        /// Comma-separated values for the axis.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
    /// Time pinned-iteration fits on synthetic data; prints CSV.
    Bench {
        #[arg(long, default_value = "km")]
        algorithm: String,
        /// n, m or k.
        #[arg(long, default_value = "n")]
        axis: String,
        #[arg(long, value_delimiter = ',', default_value = "5000,10000,20000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        iterations: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Args, Default)]
struct ConfigArgs {
    /// key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus root (bydate) or one-document-per-line file (lines).
    #[arg(long)]
    corpus: Option<String>,
    /// bydate or lines [default: bydate].
    #[arg(long)]
    corpus_format: Option<String>,
    /// 1-based test line numbers, for the lines format.
    #[arg(long)]
    split_file: Option<String>,
    /// Stopword list, one per line [default: bundled English list].
    #[arg(long)]
    stopwords: Option<String>,
    /// Minimum training document frequency [default: 5].
    #[arg(long)]
    min_df: Option<String>,
    /// Embedding file.
    #[arg(long)]
    embeddings: Option<String>,
    /// glove_text, word2vec_text or word2vec_binary [default: glove_text].
    #[arg(long)]
    embedding_format: Option<String>,
    /// Label in results [default: embedding file stem].
    #[arg(long)]
    embedding_name: Option<String>,
    /// km, sk, kd or gmm [default: km].
    #[arg(long)]
    algorithm: Option<String>,
    /// Number of topics [default: 20].
    #[arg(long)]
    k: Option<String>,
    /// Words per topic [default: 10].
    #[arg(long)]
    top_j: Option<String>,
    /// Clustering weights: uniform, tf, tf_idf or tf_df [default: uniform].
    #[arg(long)]
    weighting: Option<String>,
    /// Reranking: none, tf, tf_idf or tf_df [default: none].
    #[arg(long)]
    reranking: Option<String>,
    /// Candidates eligible for reranking [default: 100].
    #[arg(long)]
    rerank_window: Option<String>,
    /// PCA target dimension, or "full" [default: full].
    #[arg(long)]
    pca_dim: Option<String>,
    /// Comma list or inclusive range a..b [default: 0..4].
    #[arg(long)]
    seeds: Option<String>,
    /// NPMI window in tokens, or "document" [default: 10].
    #[arg(long)]
    npmi_window: Option<String>,
    /// Added to joint probabilities; 0 scores unseen pairs as -1 [default: 0].
    #[arg(long)]
    epsilon: Option<String>,
    /// Iteration cap [default: 300].
    #[arg(long)]
    max_iter: Option<String>,
    /// Convergence tolerance [default: 1e-4, gmm 1e-5].
    #[arg(long)]
    tol: Option<String>,
    /// GMM covariance floor [default: 1e-6 x mean feature variance].
    #[arg(long)]
    reg: Option<String>,
    /// Threads for the assignment step [default: 1].
    #[arg(long)]
    threads: Option<String>,
    /// Output directory [default: out].
    #[arg(long)]
    output: Option<String>,
    /// Extra key=value settings, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("corpus", &self.corpus),
            ("corpus_format", &self.corpus_format),
            ("split_file", &self.split_file),
            ("stopwords", &self.stopwords),
            ("min_df", &self.min_df),
            ("embeddings", &self.embeddings),
            ("embedding_format", &self.embedding_format),
            ("embedding_name", &self.embedding_name),
            ("algorithm", &self.algorithm),
            ("k", &self.k),
            ("top_j", &self.top_j),
            ("weighting", &self.weighting),
            ("reranking", &self.reranking),
            ("rerank_window", &self.rerank_window),
            ("pca_dim", &self.pca_dim),
            ("seeds", &self.seeds),
            ("npmi_window", &self.npmi_window),
            ("epsilon", &self.epsilon),
            ("max_iter", &self.max_iter),
            ("tol", &self.tol),
            ("reg", &self.reg),
            ("threads", &self.threads),
            ("output", &self.output),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<String> {
    let mut cache = Cache::new();
    match cli.command {
        Command::Preprocess(a) => {
            let cfg = a.resolve()?;
            let c = pipeline::preprocess(&cfg, &mut cache)?;
            Ok(format!(
                "{} documents, {} vocabulary types -> {}\n",
                c.docs.len(),
                c.vocab.len(),
                cfg.output.display()
            ))
        }
        Command::Fit(a) => {
            let cfg = a.resolve()?;
            let models = pipeline::fit_stage(&cfg, &mut cache)?;
            Ok(models
                .iter()
                .map(|m| format!("seed {}: {} iterations, objective {}\n", m.seed, m.iterations_run, m.trace.last().copied().unwrap_or(f64::NAN)))
                .collect())
        }
        Command::Topics(a) => {
            let cfg = a.resolve()?;
            let sets = pipeline::topics_stage(&cfg, &mut cache)?;
            Ok(sets.iter().map(|s| s.to_text()).collect::<Vec<_>>().join("\n"))
        }
        Command::Eval(a) => {
            let cfg = a.resolve()?;
            pipeline::eval_stage(&cfg, &mut cache)?.to_json()
        }
        Command::Run(a) => {
            let cfg = a.resolve()?;
            pipeline::run_with_cache(&cfg, &mut cache)?.report.to_json()
        }
        Command::Sweep { config, axis, values } => {
            let cfg = config.resolve()?;
            let axis: SweepAxis = axis.parse()?;
            pipeline::sweep(&cfg, axis, &values, &mut cache)
        }
        Command::Bench {
            algorithm,
            axis,
            sizes,
            n,
            m,
            k,
            iterations,
            reps,
            threads,
        } => {
            let kind: ClusterKind = algorithm.parse()?;
            let axis: BenchAxis = axis.parse()?;
            let base = BenchBase {
                n,
                m,
                k,
                iterations,
                reps,
                seed: 0,
                threads,
            };
            Ok(to_csv(&bench_scaling(axis, &sizes, kind, &base)?))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
