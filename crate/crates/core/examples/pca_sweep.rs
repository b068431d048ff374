//! Sweeps PCA dimensions (and then algorithms) over the toy data.

use std::path::PathBuf;

use embtopics::pipeline::{sweep, Cache, CorpusFormat, RunConfig, SweepAxis};
use embtopics::{RerankScheme, WeightScheme};

fn main() -> embtopics::Result<()> {
    let toy = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let base = RunConfig {
        corpus: toy.join("corpus.txt"),
        corpus_format: CorpusFormat::Lines,
        split_file: Some(toy.join("split.txt")),
        min_df: 2,
        embeddings: toy.join("embeddings.txt"),
        embedding_name: Some("toy".into()),
        k: 4,
        top_j: 5,
        weighting: WeightScheme::Tf,
        reranking: RerankScheme::Tf,
        rerank_window: 20,
        seeds: vec![0, 1, 2],
        output: std::env::temp_dir().join("embtopics-toy-sweep"),
        ..RunConfig::default()
    };
    // Corpus, embeddings and the NPMI index are loaded once and shared.
    let mut cache = Cache::new();
    let dims: Vec<String> = ["2", "5", "10", "full", "80"].map(String::from).to_vec();
    print!("{}", sweep(&base, SweepAxis::PcaDims, &dims, &mut cache)?);
    let algs: Vec<String> = ["km", "sk", "kd", "gmm"].map(String::from).to_vec();
    print!("{}", sweep(&base, SweepAxis::Algorithms, &algs, &mut cache)?);
    Ok(())
}
