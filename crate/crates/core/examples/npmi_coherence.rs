//! NPMI coherence of word lists against sliding-window co-occurrence.

use embtopics::corpus::{Document, Split};
use embtopics::evaluation::{build_index, npmi, WindowMode};

fn main() -> embtopics::Result<()> {
    let texts = [
        "rocket launch orbit moon rocket launch",
        "orbit moon nasa rocket",
        "church god faith prayer",
        "god faith church bible",
        "rocket god",
    ];
    let docs: Vec<Document> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| Document {
            id: format!("d{i}"),
            tokens: t.split_whitespace().map(str::to_string).collect(),
            split: Split::Test,
        })
        .collect();
    let words = |ws: &[&str]| ws.iter().map(|s| s.to_string()).collect::<Vec<_>>();

    for mode in [WindowMode::Sliding(3), WindowMode::Document] {
        let index = build_index(&docs, mode)?;
        println!("window {mode}: {} windows", index.total_windows());
        for topic in [&["rocket", "orbit", "moon"][..], &["god", "faith", "church"], &["rocket", "faith", "bible"]] {
            println!("  {:<24} {:+.4}", topic.join(" "), npmi(&words(topic), &index, 0.0));
        }
    }
    Ok(())
}
