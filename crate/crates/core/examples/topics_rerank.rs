//! Top-J words per cluster before and after tf reranking, and their overlap.

use std::path::PathBuf;

use embtopics::corpus::{build_vocabulary, load_lines, Stopwords};
use embtopics::embeddings::{load_embeddings, EmbeddingFormat};
use embtopics::topics::{extract_top_j, jaccard, rerank, Provenance, RerankScheme};
use embtopics::weighting::{compute_weights, WeightScheme};
use embtopics::{fit, ClusterKind, FitParams};

fn main() -> embtopics::Result<()> {
    let toy = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let docs = load_lines(&toy.join("corpus.txt"), &toy.join("split.txt"), &Stopwords::english())?;
    let corpus_vocab = build_vocabulary(&docs, 2)?;
    let (table, vocab) = load_embeddings(&toy.join("embeddings.txt"), EmbeddingFormat::GloveText, &corpus_vocab, "toy")?;

    let model = fit(ClusterKind::Km, &table.vectors, None, &FitParams::new(4, 0))?;
    let prov = Provenance {
        embedding: "toy".into(),
        algorithm: ClusterKind::Km,
        weighting: WeightScheme::Uniform,
        reranking: RerankScheme::None,
        rerank_window: 0,
        pca_dim: None,
        k: 4,
        top_j: 5,
        seed: 0,
    };
    let plain = extract_top_j(&model, &table.vectors, &vocab, 5, prov.clone())?;
    let tf = compute_weights(WeightScheme::Tf, &vocab, &corpus_vocab, &docs);
    let reranked = rerank(&model, &table.vectors, &vocab, &tf, RerankScheme::Tf, 20, 5, prov)?;

    for (a, b) in plain.topics.iter().zip(&reranked.topics) {
        println!("proximity: {}", a.words.join(" "));
        println!("tf rerank: {}\n", b.words.join(" "));
    }
    let (_, mean) = jaccard(&plain, &reranked)?;
    println!("mean Jaccard similarity {mean:.3}");
    Ok(())
}
