//! A full run on the bundled toy data: weighted clustering, reranking, NPMI.
//!
//! cargo run --example pipeline_run [output_dir]

use std::path::PathBuf;

use embtopics::pipeline::{run, CorpusFormat, RunConfig};
use embtopics::{ClusterKind, RerankScheme, WeightScheme};

fn main() -> embtopics::Result<()> {
    let toy = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let output = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("embtopics-toy-run"));
    let cfg = RunConfig {
        corpus: toy.join("corpus.txt"),
        corpus_format: CorpusFormat::Lines,
        split_file: Some(toy.join("split.txt")),
        min_df: 2,
        embeddings: toy.join("embeddings.txt"),
        embedding_name: Some("toy".into()),
        algorithm: ClusterKind::Gmm,
        k: 4,
        top_j: 5,
        weighting: WeightScheme::Tf,
        reranking: RerankScheme::Tf,
        rerank_window: 20,
        output: output.clone(),
        ..RunConfig::default()
    };
    let out = run(&cfg)?;
    println!("coverage {:.3}, {} types", out.coverage, out.vocab_size);
    print!("{}", out.topic_sets[0].to_text());
    println!("{}", out.report.csv_row());
    println!("artifacts in {}", output.display());
    Ok(())
}
