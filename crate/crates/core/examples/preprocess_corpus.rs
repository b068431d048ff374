//! Tokenizes a corpus and builds the train-split vocabulary.
//!
//! cargo run --example preprocess_corpus [corpus.txt split.txt]

use std::path::PathBuf;

use embtopics::corpus::{build_vocabulary, load_lines, preprocess, Stopwords};

fn main() -> embtopics::Result<()> {
    let toy = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let args: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let (corpus, split) = match args.as_slice() {
        [c, s] => (c.clone(), s.clone()),
        _ => (toy.join("corpus.txt"), toy.join("split.txt")),
    };

    let stop = Stopwords::english();
    println!("{:?}", preprocess("The CPU's 3 cores ran at 2.4GHz -- wow!", &stop));

    let docs = load_lines(&corpus, &split, &stop)?;
    let vocab = build_vocabulary(&docs, 2)?;
    let test = docs.iter().filter(|d| d.split == embtopics::Split::Test).count();
    println!(
        "{} documents ({} test), {} types, {} train tokens",
        docs.len(),
        test,
        vocab.len(),
        vocab.total_tokens()
    );
    for line in vocab.to_tsv().lines().take(6) {
        println!("{line}");
    }
    Ok(())
}
