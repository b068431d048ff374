//! Loads vectors for a vocabulary, normalizes them and reduces them with PCA.

use std::path::PathBuf;

use embtopics::corpus::{build_vocabulary, load_lines, Stopwords};
use embtopics::embeddings::{load_embeddings, normalize_rows, EmbeddingFormat, PcaModel};

fn main() -> embtopics::Result<()> {
    let toy = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let docs = load_lines(&toy.join("corpus.txt"), &toy.join("split.txt"), &Stopwords::english())?;
    let vocab = build_vocabulary(&docs, 2)?;
    let (table, working) = load_embeddings(&toy.join("embeddings.txt"), EmbeddingFormat::GloveText, &vocab, "toy")?;
    println!(
        "{} of {} types have {}-dimensional vectors (coverage {:.3})",
        working.len(),
        vocab.len(),
        table.dim(),
        table.coverage
    );

    let unit = normalize_rows(&table)?;
    println!("norm of row 0 after normalization: {:.6}", embtopics::matrix::norm(unit.row(0)));

    let pca = PcaModel::fit(&table.vectors, 5)?;
    let total: f64 = pca.eigenvalues.iter().sum();
    for (i, ev) in pca.eigenvalues.iter().take(5).enumerate() {
        println!("component {i}: {:.1}% of variance", 100.0 * ev / total);
    }
    let reduced = pca.transform(&table.vectors);
    println!("reduced table: {} x {}", reduced.rows(), reduced.cols());
    Ok(())
}
