//! Computes tf, tf-idf and tf-df weights for every vocabulary type.

use std::path::PathBuf;

use embtopics::corpus::{build_vocabulary, load_lines, Stopwords};
use embtopics::weighting::{compute_weights, WeightScheme};

fn main() -> embtopics::Result<()> {
    let toy = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let docs = load_lines(&toy.join("corpus.txt"), &toy.join("split.txt"), &Stopwords::english())?;
    let vocab = build_vocabulary(&docs, 2)?;
    let schemes = [WeightScheme::Tf, WeightScheme::TfIdf, WeightScheme::TfDf];
    let weights: Vec<_> = schemes.iter().map(|&s| compute_weights(s, &vocab, &vocab, &docs)).collect();
    println!("{:<14} {:>10} {:>10} {:>10}", "type", "tf", "tf_idf", "tf_df");
    for (i, t) in vocab.types().iter().enumerate().step_by(6) {
        println!(
            "{t:<14} {:>10.5} {:>10.5} {:>10.5}",
            weights[0].weights[i], weights[1].weights[i], weights[2].weights[i]
        );
    }
    Ok(())
}
