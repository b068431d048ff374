//! Acceptance suite: one PASS/FAIL line per criterion, then a nonzero exit if
//! any failed.
//!
//! Criteria that need the 20 Newsgroups corpus and GloVe vectors read them from
//! the environment and FAIL when they are absent:
//!
//! * `EMBTOPICS_20NG`: the bydate root (with `20news-bydate-train/` and `-test/`)
//! * `EMBTOPICS_GLOVE`: a GloVe text file, e.g. `glove.6B.300d.txt`
//! * `EMBTOPICS_EMBEDDINGS` (optional): more comma-separated files for the
//!   cross-embedding averages, each `name=path`. Files ending in `.bin` are read
//!   as word2vec binary, `.vec` or `.w2v` as word2vec text, anything else as GloVe.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use embtopics::bench::{bench_scaling, ratios, synthetic_gaussian, BenchAxis, BenchBase};
use embtopics::clustering::FitParams;
use embtopics::corpus::{load_20ng, Stopwords};
use embtopics::embeddings::normalize_matrix;
use embtopics::evaluation::{build_index, npmi, WindowMode};
use embtopics::pipeline::{self, run, run_with_cache, Cache, CorpusFormat, RunConfig};
use embtopics::{fit, ClusterKind, Document, EmbeddingFormat, RerankScheme, WeightScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;

struct Real {
    corpus: PathBuf,
    /// GloVe first.
    embeddings: Vec<(String, PathBuf, EmbeddingFormat)>,
}

fn format_for(path: &Path) -> EmbeddingFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin") => EmbeddingFormat::Word2vecBinary,
        Some("vec") | Some("w2v") => EmbeddingFormat::Word2vecText,
        _ => EmbeddingFormat::GloveText,
    }
}

fn real_data() -> Result<Real, String> {
    let var = |k: &str| std::env::var_os(k).map(PathBuf::from).filter(|p| p.exists());
    let (Some(corpus), Some(glove)) = (var("EMBTOPICS_20NG"), var("EMBTOPICS_GLOVE")) else {
        return Err("data unavailable: set EMBTOPICS_20NG and EMBTOPICS_GLOVE".into());
    };
    let mut embeddings = vec![("glove".to_string(), glove.clone(), format_for(&glove))];
    if let Ok(extra) = std::env::var("EMBTOPICS_EMBEDDINGS") {
        for item in extra.split(',').filter(|s| !s.trim().is_empty()) {
            let (name, path) = item.split_once('=').ok_or(format!("EMBTOPICS_EMBEDDINGS entry {item:?} is not name=path"))?;
            let path = PathBuf::from(path.trim());
            embeddings.push((name.trim().to_string(), path.clone(), format_for(&path)));
        }
    }
    Ok(Real { corpus, embeddings })
}

/// Runs one cell on the real data and returns its mean NPMI over five seeds.
struct Cells {
    real: Real,
    cache: Cache,
    out: tempfile::TempDir,
    memo: BTreeMap<String, f64>,
}

impl Cells {
    fn new(real: Real) -> Self {
        Cells {
            real,
            cache: Cache::new(),
            out: tempfile::tempdir().expect("temp dir"),
            memo: BTreeMap::new(),
        }
    }

    fn config(&self, emb: usize, kind: ClusterKind, w: WeightScheme, r: RerankScheme, pca: Option<usize>) -> RunConfig {
        let (name, path, format) = &self.real.embeddings[emb];
        let label = format!("{name}-{kind}-{w}-{r}-{}", pca.map_or("full".into(), |d| d.to_string()));
        RunConfig {
            corpus: self.real.corpus.clone(),
            corpus_format: CorpusFormat::Bydate,
            embeddings: path.clone(),
            embedding_format: *format,
            embedding_name: Some(name.clone()),
            algorithm: kind,
            weighting: w,
            reranking: r,
            pca_dim: pca,
            output: self.out.path().join(label),
            ..RunConfig::default()
        }
    }

    fn mean(&mut self, emb: usize, kind: ClusterKind, w: WeightScheme, r: RerankScheme, pca: Option<usize>) -> Result<f64, String> {
        let cfg = self.config(emb, kind, w, r, pca);
        let key = cfg.output.display().to_string();
        if let Some(&m) = self.memo.get(&key) {
            return Ok(m);
        }
        let out = run_with_cache(&cfg, &mut self.cache).map_err(|e| format!("{key}: {e}"))?;
        self.memo.insert(key, out.report.mean);
        Ok(out.report.mean)
    }
}

fn npmi_oracle() -> Outcome {
    let t = Instant::now();
    let docs: Vec<Document> = match std::env::var_os("EMBTOPICS_20NG") {
        Some(root) if Path::new(&root).exists() => {
            let all = load_20ng(Path::new(&root), &Stopwords::english()).map_err(|e| e.to_string())?;
            all.into_iter().filter(|d| d.split == embtopics::Split::Test).take(100).collect()
        }
        _ => random_test_docs(100, 60, 2024),
    };
    let source = if docs.iter().any(|d| d.id.contains('/')) { "20ng test" } else { "synthetic" };
    let mut types: Vec<String> = docs.iter().flat_map(|d| d.tokens.iter().cloned()).collect();
    types.sort();
    types.dedup();
    let mut worst = 0.0f64;
    let mut topics = 0;
    for mode in [WindowMode::Sliding(10), WindowMode::Document] {
        let index = build_index(&docs, mode).map_err(|e| e.to_string())?;
        let windows = brute_windows(&docs, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            // Mix frequent words (likely to co-occur) with arbitrary ones.
            let topic: Vec<String> = (0..10)
                .map(|i| {
                    let r = if i % 2 == 0 { rng.random_range(0..types.len().min(40)) } else { rng.random_range(0..types.len()) };
                    types[r].clone()
                })
                .collect();
            worst = worst.max((npmi(&topic, &index, 0.0) - brute_npmi(&topic, &windows)).abs());
            topics += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let detail = format!("{topics} topics on 100 {source} documents, max |diff| {worst:.2e}, {secs:.1}s");
    if worst <= 1e-9 && secs < 60.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn kmeans_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut single_hits, mut exact, mut local) = (0, 0, 0);
    let instances = 20;
    for trial in 0..instances {
        let n = rng.random_range(6..=12);
        let m = 1 + trial % 2;
        let k = if n > 10 { 2 } else { rng.random_range(2..=3) };
        let data = random_matrix(&mut rng, n, m, 10.0);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
        let optimum = exhaustive_kmeans(&data, &w, k);
        let close = |a: f64| (a - optimum).abs() <= 1e-9 * optimum.max(1.0);
        let mut best = f64::INFINITY;
        for seed in 0..100 {
            let model = fit(ClusterKind::Km, &data, Some(&w), &FitParams::new(k, seed)).map_err(|e| e.to_string())?;
            let cost = *model.trace.last().unwrap();
            if !is_lloyd_fixed_point(&data, &w, &model.assignments.labels(), k) {
                return Err(format!("instance {trial} seed {seed} stopped off a local optimum"));
            }
            if seed == 0 && close(cost) {
                single_hits += 1;
            }
            best = best.min(cost);
        }
        if close(best) {
            exact += 1;
        } else if best <= best_of_random_restarts(&data, &w, k, 100, trial as u64) + 1e-9 {
            local += 1;
        } else {
            return Err(format!("instance {trial}: {best} above the optimum {optimum} and the restart baseline"));
        }
    }
    Ok(format!(
        "{instances} instances (n 6-12, m 1-2): {exact} at the exhaustive optimum, {local} at a local optimum within random restarts; single start optimal in {single_hits}"
    ))
}

fn uniform_collapse() -> Outcome {
    let mut checked = 0;
    for input in 0..5u64 {
        let data = synthetic_gaussian(300, 8, 5, 100 + input);
        let ones = vec![1.0; data.rows()];
        for kind in [ClusterKind::Km, ClusterKind::Sk, ClusterKind::Kd, ClusterKind::Gmm] {
            let x = if kind == ClusterKind::Sk { normalize_matrix(&data).unwrap() } else { data.clone() };
            let p = FitParams::for_kind(kind, 5, input);
            let a = fit(kind, &x, None, &p).map_err(|e| e.to_string())?;
            let b = fit(kind, &x, Some(&ones), &p).map_err(|e| e.to_string())?;
            // Debug prints each float in shortest round-trip form: equal text, equal bits.
            if format!("{a:?}") != format!("{b:?}") {
                return Err(format!("{kind} differs on input {input}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} fits (km, sk, kd, gmm on 5 inputs) bit-identical"))
}

fn frequency_ordering(cells: &mut Cells) -> Outcome {
    let km = cells.mean(0, ClusterKind::Km, WeightScheme::Uniform, RerankScheme::None, None)?;
    let km_r = cells.mean(0, ClusterKind::Km, WeightScheme::Uniform, RerankScheme::Tf, None)?;
    let km_wr = cells.mean(0, ClusterKind::Km, WeightScheme::Tf, RerankScheme::Tf, None)?;
    let cfg = cells.config(0, ClusterKind::Km, WeightScheme::Tf, RerankScheme::Tf, None);
    let prep = pipeline::prepare(&cfg, &mut cells.cache).map_err(|e| e.to_string())?;
    let t = Instant::now();
    pipeline::fit_seed(&cfg, &prep, 0).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let band = |x: f64, reference: f64| if (x - reference).abs() <= 0.08 { "within" } else { "outside" };
    let detail = format!(
        "KM {km:.3} ({} ±0.08 of -0.436), KM_r {km_r:.3}, KM+_r {km_wr:.3} ({} ±0.08 of 0.219), gap {:.3}; KM+ fit {secs:.1}s on n={}",
        band(km, -0.436),
        band(km_wr, 0.219),
        km_wr - km,
        prep.data.rows()
    );
    if km < 0.0 && km_r > 0.0 && km_wr - km >= 0.4 && secs <= 60.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gmm_robustness(cells: &mut Cells) -> Outcome {
    let gmm = cells.mean(0, ClusterKind::Gmm, WeightScheme::Tf, RerankScheme::None, None)?;
    let km = cells.mean(0, ClusterKind::Km, WeightScheme::Tf, RerankScheme::None, None)?;
    let sk = cells.mean(0, ClusterKind::Sk, WeightScheme::Tf, RerankScheme::None, None)?;
    let detail = format!("GMM+ {gmm:.3}, KM+ {km:.3}, SK+ {sk:.3}");
    if gmm > km && gmm > sk {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rerank_schemes(cells: &mut Cells) -> Outcome {
    let n = cells.real.embeddings.len();
    let mut avg = [0.0; 3];
    for e in 0..n {
        for (slot, r) in [RerankScheme::Tf, RerankScheme::TfDf, RerankScheme::TfIdf].into_iter().enumerate() {
            avg[slot] += cells.mean(e, ClusterKind::Km, WeightScheme::Uniform, r, None)? / n as f64;
        }
    }
    let [tf, tf_df, tf_idf] = avg;
    let detail = format!(
        "over {n} embedding(s): tf {tf:.3}, tf_df {tf_df:.3} (tf {} tf_df), tf_idf {tf_idf:.3}; tf - tf_idf {:.3}",
        if tf >= tf_df { ">=" } else { "<" },
        tf - tf_idf
    );
    if tf - tf_idf >= 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn kmedoids_vs_kmeans(cells: &mut Cells) -> Outcome {
    let n = cells.real.embeddings.len();
    let (mut kd, mut km) = (0.0, 0.0);
    for e in 0..n {
        for r in [RerankScheme::None, RerankScheme::Tf] {
            kd += cells.mean(e, ClusterKind::Kd, WeightScheme::Uniform, r, None)? / (2 * n) as f64;
            km += cells.mean(e, ClusterKind::Km, WeightScheme::Uniform, r, None)? / (2 * n) as f64;
        }
    }
    let detail = format!("over {n} embedding(s), plain and tf-reranked: KD {kd:.3}, KM {km:.3}");
    if kd <= km + 0.02 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pca_sweep(cells: &mut Cells) -> Outcome {
    let full = cells.mean(0, ClusterKind::Gmm, WeightScheme::Tf, RerankScheme::None, None)?;
    let mut parts = vec![format!("full {full:.3}")];
    let mut ok = true;
    for d in [100, 150] {
        let v = cells.mean(0, ClusterKind::Gmm, WeightScheme::Tf, RerankScheme::None, Some(d))?;
        // Gate on no collapse; improvements are reported, not penalized.
        ok &= v > full - 0.05;
        parts.push(format!("{d}d {v:.3} ({:+.3})", v - full));
    }
    let detail = format!("GloVe GMM+: {}", parts.join(", "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn complexity() -> Outcome {
    let base = BenchBase::default();
    let km = bench_scaling(BenchAxis::N, &[5_000, 10_000, 20_000], ClusterKind::Km, &base).map_err(|e| e.to_string())?;
    let km_ratios = ratios(&km);
    let gmm = bench_scaling(BenchAxis::M, &[50, 100], ClusterKind::Gmm, &base).map_err(|e| e.to_string())?;
    let gmm_ratio = ratios(&gmm)[0];

    let one = fit(ClusterKind::Km, &synthetic_gaussian(1000, 10, 3, 0), None, &FitParams::new(1, 0)).map_err(|e| e.to_string())?;

    let data = synthetic_gaussian(20_000, 300, 20, 0);
    let t = Instant::now();
    let model = fit(ClusterKind::Km, &data, None, &FitParams::new(20, 0)).map_err(|e| e.to_string())?;
    let budget = t.elapsed().as_secs_f64();
    // Separated synthetic clusters converge fast, so also price an iteration.
    let mut pinned = FitParams::new(20, 0);
    pinned.max_iter = 30;
    pinned.pinned = true;
    let t = Instant::now();
    fit(ClusterKind::Km, &data, None, &pinned).map_err(|e| e.to_string())?;
    let per_iter = t.elapsed().as_secs_f64() / 30.0;

    let km_ok = km_ratios.iter().all(|r| (1.6..=2.6).contains(r));
    let detail = format!(
        "km n 5k/10k/20k ratios {:.2}/{:.2}; gmm m 50->100 ratio {gmm_ratio:.2} (superlinear {}, above 4 {}); k=1 in {} iterations; km n=20000 m=300 k=20 {budget:.1}s ({} iterations; {:.0} ms per iteration)",
        km_ratios[0],
        km_ratios[1],
        if gmm_ratio > 2.0 { "yes" } else { "no" },
        if gmm_ratio > 4.0 { "yes" } else { "no" },
        one.iterations_run,
        model.iterations_run,
        per_iter * 1e3
    );
    if km_ok && gmm_ratio > 2.0 && one.iterations_run <= 2 && budget < 60.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for kind in [ClusterKind::Km, ClusterKind::Sk, ClusterKind::Kd, ClusterKind::Gmm] {
        let mut cfg = toy_config(tmp.path().join(kind.as_str()));
        cfg.algorithm = kind;
        cfg.weighting = WeightScheme::Tf;
        cfg.reranking = RerankScheme::Tf;
        cfg.seeds = (0..5).collect();
        run(&cfg).map_err(|e| e.to_string())?;
        let first = snapshot(&cfg.output);
        run(&cfg).map_err(|e| e.to_string())?;
        if snapshot(&cfg.output) != first {
            return Err(format!("{kind} outputs changed between identical runs"));
        }
        files += first.len();
    }
    Ok(format!("toy runs for km, sk, kd, gmm (5 seeds each), {files} files byte-identical"))
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, outcome: Outcome| {
        match outcome {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
        }
    };
    report("npmi oracle", npmi_oracle());
    report("weighted kmeans oracle", kmeans_oracle());
    report("uniform weight collapse", uniform_collapse());

    match real_data() {
        Ok(real) => {
            let mut cells = Cells::new(real);
            report("weighting and reranking order (20ng + glove)", frequency_ordering(&mut cells));
            report("gmm robustness (20ng + glove)", gmm_robustness(&mut cells));
            report("rerank scheme averages", rerank_schemes(&mut cells));
            report("kmedoids vs kmeans", kmedoids_vs_kmeans(&mut cells));
            report("pca sweep (glove + gmm+)", pca_sweep(&mut cells));
        }
        Err(why) => {
            for name in [
                "weighting and reranking order (20ng + glove)",
                "gmm robustness (20ng + glove)",
                "rerank scheme averages",
                "kmedoids vs kmeans",
                "pca sweep (glove + gmm+)",
            ] {
                report(name, Err(why.clone()));
            }
        }
    }

    report("complexity contract", complexity());
    report("determinism", determinism());

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
