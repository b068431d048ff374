//! Corpus ingestion: tokenization, stopword removal, the 20 Newsgroups
//! bydate layout, and the train-split vocabulary with its count statistics.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of training documents a type must occur in.
pub const DEFAULT_MIN_DF: u32 = 5;

const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
    pub split: Split,
}

/// A set of lowercase stopwords.
#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// The English list shipped with this crate (`data/stopwords_en.txt`).
    pub fn english() -> Self {
        Self::parse(BUNDLED_STOPWORDS)
    }

    /// One word per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Anything that is neither alphanumeric nor whitespace counts as punctuation.
fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Splits on Unicode whitespace, lowercases, strips leading/trailing
/// punctuation and drops stopwords and any token that still contains a digit
/// or punctuation character.
pub fn preprocess(raw_text: &str, stopwords: &Stopwords) -> Vec<String> {
    raw_text
        .split_whitespace()
        .filter_map(|raw| {
            let tok = raw.trim_matches(is_punct).to_lowercase();
            if tok.is_empty() || tok.chars().any(|c| c.is_numeric() || is_punct(c)) {
                return None;
            }
            if stopwords.contains(&tok) {
                return None;
            }
            Some(tok)
        })
        .collect()
}

/// Drops the message header: everything up to and including the first blank line.
/// A message without a blank line is treated as header-only.
pub fn strip_header(message: &str) -> &str {
    let mut offset = 0;
    for line in message.split_inclusive('\n') {
        offset += line.len();
        if line.trim().is_empty() {
            return &message[offset..];
        }
    }
    ""
}

pub const BYDATE_TRAIN_DIR: &str = "20news-bydate-train";
pub const BYDATE_TEST_DIR: &str = "20news-bydate-test";

/// Loads the 20 Newsgroups "bydate" archive rooted at `path`. Each file becomes
/// one document; groups and files are visited in lexicographic order.
pub fn load_20ng(path: &Path, stopwords: &Stopwords) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (dir, split, tag) in [
        (BYDATE_TRAIN_DIR, Split::Train, "train"),
        (BYDATE_TEST_DIR, Split::Test, "test"),
    ] {
        let root = path.join(dir);
        if !root.is_dir() {
            return Err(Error::MissingSplit(root));
        }
        for group in sorted_entries(&root)? {
            if !group.is_dir() {
                continue;
            }
            let group_name = file_name(&group);
            for file in sorted_entries(&group)? {
                if !file.is_file() {
                    continue;
                }
                let bytes = fs::read(&file).map_err(|e| Error::io(&file, e))?;
                let text = String::from_utf8_lossy(&bytes);
                docs.push(Document {
                    id: format!("{tag}/{group_name}/{}", file_name(&file)),
                    tokens: preprocess(strip_header(&text), stopwords),
                    split,
                });
            }
        }
    }
    Ok(docs)
}

fn sorted_entries(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut out = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Generic corpus: one document per line of `corpus`, with `split_file` listing
/// the 1-based line numbers of test documents (whitespace separated).
pub fn load_lines(corpus: &Path, split_file: &Path, stopwords: &Stopwords) -> Result<Vec<Document>> {
    let bytes = fs::read(corpus).map_err(|e| Error::io(corpus, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let split_text = fs::read_to_string(split_file).map_err(|e| Error::io(split_file, e))?;
    let mut test_lines = HashSet::new();
    for (i, tok) in split_text.split_whitespace().enumerate() {
        let n: usize = tok.parse().map_err(|_| {
            Error::format(
                format!("{}: entry {}", split_file.display(), i + 1),
                format!("expected a line number, got {tok:?}"),
            )
        })?;
        if n == 0 {
            return Err(Error::format(
                format!("{}: entry {}", split_file.display(), i + 1),
                "line numbers are 1-based",
            ));
        }
        test_lines.insert(n);
    }
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, line)| Document {
            id: format!("line{}", i + 1),
            tokens: preprocess(line, stopwords),
            split: if test_lines.contains(&(i + 1)) {
                Split::Test
            } else {
                Split::Train
            },
        })
        .collect())
}

/// Type/index map and train-split count statistics.
///
/// For a vocabulary produced by [`build_vocabulary`], `total_tokens` equals the
/// sum of `term_freq`. A vocabulary narrowed with [`Vocabulary::restrict`] keeps
/// the corpus totals, so the sum may fall short of `total_tokens`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    types: Vec<String>,
    index: HashMap<String, usize>,
    term_freq: Vec<u64>,
    doc_freq: Vec<u32>,
    total_tokens: u64,
    num_docs: u32,
}

impl Vocabulary {
    /// Assembles a vocabulary from `(type, term_freq, doc_freq)` rows, sorting
    /// them lexicographically. Rejects duplicates and zero document counts.
    pub fn from_counts(
        mut rows: Vec<(String, u64, u32)>,
        total_tokens: u64,
        num_docs: u32,
    ) -> Result<Self> {
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let mut v = Vocabulary {
            types: Vec::with_capacity(rows.len()),
            index: HashMap::with_capacity(rows.len()),
            term_freq: Vec::with_capacity(rows.len()),
            doc_freq: Vec::with_capacity(rows.len()),
            total_tokens,
            num_docs,
        };
        for (t, tf, df) in rows {
            if df == 0 || df > num_docs {
                return Err(Error::InvalidArgument(format!(
                    "doc_freq of {t:?} is {df}, outside 1..={num_docs}"
                )));
            }
            if v.index.insert(t.clone(), v.types.len()).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate type {t:?}")));
            }
            v.types.push(t);
            v.term_freq.push(tf);
            v.doc_freq.push(df);
        }
        let sum: u64 = v.term_freq.iter().sum();
        if sum > total_tokens {
            return Err(Error::InvalidArgument(format!(
                "term frequencies sum to {sum}, above total_tokens={total_tokens}"
            )));
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn word(&self, i: usize) -> &str {
        &self.types[i]
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn term_freq(&self) -> &[u64] {
        &self.term_freq
    }

    pub fn doc_freq(&self) -> &[u32] {
        &self.doc_freq
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn num_docs(&self) -> u32 {
        self.num_docs
    }

    /// Keeps the types for which `keep` returns true. Counts of retained types
    /// and the corpus totals are left untouched.
    pub fn restrict(&self, mut keep: impl FnMut(&str) -> bool) -> Vocabulary {
        let mut out = Vocabulary {
            types: Vec::new(),
            index: HashMap::new(),
            term_freq: Vec::new(),
            doc_freq: Vec::new(),
            total_tokens: self.total_tokens,
            num_docs: self.num_docs,
        };
        for (i, t) in self.types.iter().enumerate() {
            if keep(t) {
                out.index.insert(t.clone(), out.types.len());
                out.types.push(t.clone());
                out.term_freq.push(self.term_freq[i]);
                out.doc_freq.push(self.doc_freq[i]);
            }
        }
        out
    }

    /// `#total_tokens=<N> num_docs=<D>` header, then `type\tterm_freq\tdoc_freq`.
    pub fn to_tsv(&self) -> String {
        let mut s = format!("#total_tokens={} num_docs={}\n", self.total_tokens, self.num_docs);
        for i in 0..self.len() {
            let _ = writeln!(s, "{}\t{}\t{}", self.types[i], self.term_freq[i], self.doc_freq[i]);
        }
        s
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format("line 1", "missing header"))?;
        let (total_tokens, num_docs) = parse_vocab_header(header)?;
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let loc = || format!("line {}", i + 2);
            let mut parts = line.split('\t');
            let (Some(t), Some(tf), Some(df), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::format(loc(), "expected 3 tab-separated fields"));
            };
            let tf = tf
                .parse()
                .map_err(|_| Error::format(loc(), format!("bad term_freq {tf:?}")))?;
            let df = df
                .parse()
                .map_err(|_| Error::format(loc(), format!("bad doc_freq {df:?}")))?;
            rows.push((t.to_string(), tf, df));
        }
        Self::from_counts(rows, total_tokens, num_docs)
    }
}

fn parse_vocab_header(header: &str) -> Result<(u64, u32)> {
    let bad = || Error::format("line 1", format!("bad header {header:?}"));
    let rest = header.strip_prefix("#total_tokens=").ok_or_else(bad)?;
    let (n, d) = rest.split_once(" num_docs=").ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?))
}

/// Counts types over the training documents and keeps those occurring in at
/// least `min_df` of them. Test documents are ignored.
pub fn build_vocabulary(docs: &[Document], min_df: u32) -> Result<Vocabulary> {
    let train: Vec<&Document> = docs.iter().filter(|d| d.split == Split::Train).collect();
    if train.is_empty() {
        return Err(Error::InvalidArgument("no training documents".into()));
    }
    let mut counts: BTreeMap<&str, (u64, u32)> = BTreeMap::new();
    for doc in &train {
        let mut seen = HashSet::new();
        for tok in &doc.tokens {
            let e = counts.entry(tok.as_str()).or_default();
            e.0 += 1;
            if seen.insert(tok.as_str()) {
                e.1 += 1;
            }
        }
    }
    let rows: Vec<(String, u64, u32)> = counts
        .into_iter()
        .filter(|(_, (_, df))| *df >= min_df)
        .map(|(t, (tf, df))| (t.to_string(), tf, df))
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyVocabulary { min_df });
    }
    let total = rows.iter().map(|r| r.1).sum();
    Vocabulary::from_counts(rows, total, train.len() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(tokens: &[&str]) -> Document {
        Document {
            id: String::new(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            split: Split::Train,
        }
    }

    #[test]
    fn preprocess_drops_stopwords_digits_and_punctuation() {
        let sw = Stopwords::english();
        assert_eq!(preprocess("The CPU runs at 3GHz!", &sw), vec!["cpu", "runs"]);
        assert!(preprocess("", &sw).is_empty());
        assert!(preprocess("!!! ... -- 42", &sw).is_empty());
    }

    #[test]
    fn preprocess_rejects_inner_punctuation() {
        let sw = Stopwords::default();
        assert_eq!(preprocess("(hello), e-mail don't world.", &sw), vec!["hello", "world"]);
    }

    #[test]
    fn preprocess_hand_checked_message() {
        // Body of a short newsgroup-style post, tokenized by hand with the rules
        // above and the bundled stopword list.
        let msg = "From: someone@example.edu\nSubject: Re: Jesus and the Bible\n\n\
                   In article <1993Apr5.1234@x.edu> you wrote:\n\
                   > The Bible was written by 40 authors.\n\
                   I think Christians read it differently, don't they?\n";
        let got = preprocess(strip_header(msg), &Stopwords::english());
        let want = vec![
            "article", "wrote", "bible", "written", "authors", "think", "christians", "read",
            "differently",
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn header_is_stripped_at_first_blank_line() {
        assert_eq!(strip_header("a: b\nc: d\n\nbody\n\nmore"), "body\n\nmore");
        assert_eq!(strip_header("a: b\r\n\r\nbody"), "body");
        assert_eq!(strip_header("only header"), "");
    }

    #[test]
    fn min_df_filter() {
        let mut docs: Vec<Document> = (0..6).map(|_| doc(&["apple"])).collect();
        docs.push(doc(&["pear"]));
        let v = build_vocabulary(&docs, 5).unwrap();
        assert_eq!(v.types(), ["apple"]);
        assert_eq!(v.doc_freq(), [6]);
        assert_eq!(v.num_docs(), 7);
    }

    #[test]
    fn direct_counts() {
        let v = build_vocabulary(&[doc(&["a", "b"]), doc(&["b"])], 1).unwrap();
        assert_eq!(v.types(), ["a", "b"]);
        assert_eq!(v.term_freq(), [1, 2]);
        assert_eq!(v.doc_freq(), [1, 2]);
        assert_eq!(v.total_tokens(), 3);
    }

    #[test]
    fn test_split_is_not_counted() {
        let mut d = doc(&["a", "a"]);
        d.split = Split::Test;
        let v = build_vocabulary(&[doc(&["a"]), d], 1).unwrap();
        assert_eq!(v.term_freq(), [1]);
        assert_eq!(v.num_docs(), 1);
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let err = build_vocabulary(&[doc(&["a"])], 5).unwrap_err();
        assert!(matches!(err, Error::EmptyVocabulary { min_df: 5 }));
    }

    #[test]
    fn tsv_round_trip() {
        let v = build_vocabulary(&[doc(&["b", "a", "b"]), doc(&["b"])], 1).unwrap();
        let tsv = v.to_tsv();
        assert_eq!(tsv, "#total_tokens=4 num_docs=2\na\t1\t1\nb\t3\t2\n");
        assert_eq!(Vocabulary::from_tsv(&tsv).unwrap(), v);
    }

    #[test]
    fn restrict_keeps_totals() {
        let v = build_vocabulary(&[doc(&["b", "a", "b"]), doc(&["b", "c"])], 1).unwrap();
        let r = v.restrict(|t| t != "b");
        assert_eq!(r.types(), ["a", "c"]);
        assert_eq!(r.index_of("c"), Some(1));
        assert_eq!(r.total_tokens(), 5);
        assert_eq!(r.term_freq(), [1, 1]);
    }

    #[test]
    fn missing_split_directory() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_20ng(dir.path(), &Stopwords::english()).unwrap_err();
        assert!(matches!(err, Error::MissingSplit(_)));
    }

    #[test]
    fn bydate_layout_is_loaded_with_split_tags() {
        let dir = tempfile::tempdir().unwrap();
        for (split, n) in [(BYDATE_TRAIN_DIR, 3), (BYDATE_TEST_DIR, 2)] {
            let g = dir.path().join(split).join("sci.space");
            fs::create_dir_all(&g).unwrap();
            for i in 0..n {
                fs::write(g.join(format!("{}", 100 + i)), b"Subject: x\n\nOrbit launch \xff shuttle\n")
                    .unwrap();
            }
        }
        let docs = load_20ng(dir.path(), &Stopwords::english()).unwrap();
        assert_eq!(docs.len(), 5);
        assert_eq!(docs.iter().filter(|d| d.split == Split::Train).count(), 3);
        assert_eq!(docs[0].id, "train/sci.space/100");
        assert_eq!(docs[0].tokens, preprocess("Orbit launch \u{fffd} shuttle", &Stopwords::english()));
        assert_eq!(docs[0].tokens, vec!["orbit", "launch", "shuttle"]);
    }

    #[test]
    fn line_corpus_with_split_file() {
        let dir = tempfile::tempdir().unwrap();
        let c = dir.path().join("c.txt");
        let s = dir.path().join("s.txt");
        fs::write(&c, "alpha beta\ngamma\ndelta epsilon\n").unwrap();
        fs::write(&s, "2\n").unwrap();
        let docs = load_lines(&c, &s, &Stopwords::default()).unwrap();
        let splits: Vec<Split> = docs.iter().map(|d| d.split).collect();
        assert_eq!(splits, [Split::Train, Split::Test, Split::Train]);
        fs::write(&s, "0\n").unwrap();
        assert!(load_lines(&c, &s, &Stopwords::default()).is_err());
    }
}
