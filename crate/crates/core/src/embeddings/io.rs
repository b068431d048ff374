use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EmbeddingTable;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingFormat {
    /// `<n> <m>` header, then `<word> <f1> ... <fm>` lines.
    Word2vecText,
    /// ASCII `<n> <m>` header, then `<word><space>` and m little-endian f32 per entry.
    Word2vecBinary,
    /// `<word> <f1> ... <fm>` lines, no header.
    GloveText,
}

impl FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word2vec_text" => Ok(Self::Word2vecText),
            "word2vec_binary" => Ok(Self::Word2vecBinary),
            "glove_text" => Ok(Self::GloveText),
            _ => Err(Error::InvalidArgument(format!("unknown embedding format {s:?}"))),
        }
    }
}

impl EmbeddingFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Word2vecText => "word2vec_text",
            Self::Word2vecBinary => "word2vec_binary",
            Self::GloveText => "glove_text",
        }
    }
}

/// Loads the vectors of the vocabulary's types from `path`.
///
/// Types without a vector (or whose vector is all zeros) are dropped; the
/// returned vocabulary is the retained subset with counts untouched, and table
/// row `i` belongs to its type `i`. When a word occurs twice, the first entry
/// wins.
pub fn load_embeddings(
    path: &Path,
    format: EmbeddingFormat,
    vocab: &Vocabulary,
    source_name: &str,
) -> Result<(EmbeddingTable, Vocabulary)> {
    let mut found: Vec<Option<Vec<f64>>> = vec![None; vocab.len()];
    let dim = scan(
        path,
        format,
        |word| vocab.index_of(word),
        |i, v| {
            if found[i].is_none() {
                found[i] = Some(v);
            }
        },
    )?;

    let keep: Vec<bool> = found
        .iter()
        .map(|v| v.as_ref().is_some_and(|v| v.iter().any(|&x| x != 0.0)))
        .collect();
    let mut data = Vec::new();
    for (slot, &k) in found.into_iter().zip(&keep) {
        if k {
            data.extend(slot.unwrap());
        }
    }
    let retained = keep.iter().filter(|&&k| k).count();
    let reduced = vocab.restrict(|t| keep[vocab.index_of(t).unwrap()]);
    let coverage = if vocab.is_empty() {
        0.0
    } else {
        retained as f64 / vocab.len() as f64
    };
    let table = EmbeddingTable::new(Matrix::from_vec(retained, dim, data), coverage, source_name);
    Ok((table, reduced))
}

/// Reads every entry of an embedding file, in file order.
pub fn read_embeddings(path: &Path, format: EmbeddingFormat) -> Result<(Vec<String>, Matrix)> {
    let mut words = Vec::new();
    let mut rows = Vec::new();
    let dim = scan(
        path,
        format,
        |w| {
            words.push(w.to_string());
            Some(words.len() - 1)
        },
        |_, v| rows.push(v),
    )?;
    let mut data = Vec::with_capacity(rows.len() * dim);
    rows.into_iter().for_each(|r| data.extend(r));
    let n = words.len();
    Ok((words, Matrix::from_vec(n, dim, data)))
}

/// Writes `table` in word2vec text format, using the shortest decimal form
/// that parses back to the same f64.
pub fn write_word2vec_text<W: Write>(
    table: &EmbeddingTable,
    vocab: &Vocabulary,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "{} {}", table.len(), table.dim())?;
    for (i, row) in table.vectors.iter_rows().enumerate().take(table.len()) {
        write!(w, "{}", vocab.word(i))?;
        for v in row {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Walks the file, asking `want` for a slot per word and handing parsed
/// vectors to `store`. Returns the vector dimension.
fn scan(
    path: &Path,
    format: EmbeddingFormat,
    mut want: impl FnMut(&str) -> Option<usize>,
    mut store: impl FnMut(usize, Vec<f64>),
) -> Result<usize> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);
    let loc = |line: usize, offset: u64| format!("{}:{line} (byte {offset})", path.display());

    let mut line_no = 0usize;
    let mut offset = 0u64;
    let mut buf = Vec::new();
    let mut declared: Option<(usize, usize)> = None;

    if format != EmbeddingFormat::GloveText {
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io(path, e))?;
        line_no += 1;
        let text = String::from_utf8_lossy(&buf);
        let mut it = text.split_ascii_whitespace();
        let parsed = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        declared = Some(parsed.ok_or_else(|| {
            Error::format(loc(1, 0), format!("expected `<n> <m>` header, got {:?}", text.trim_end()))
        })?);
        offset += n as u64;
    }

    if format == EmbeddingFormat::Word2vecBinary {
        let (n, m) = declared.unwrap();
        let mut vec_buf = vec![0u8; 4 * m];
        for entry in 0..n {
            let start = offset;
            buf.clear();
            // Skip separator whitespace left by writers that end entries with '\n'.
            loop {
                let b = reader.fill_buf().map_err(|e| Error::io(path, e))?;
                match b.first() {
                    Some(c) if c.is_ascii_whitespace() => {
                        reader.consume(1);
                        offset += 1;
                    }
                    Some(_) => break,
                    None => {
                        return Err(Error::format(
                            loc(entry + 2, start),
                            format!("file ends after {entry} of {n} entries"),
                        ))
                    }
                }
            }
            let k = reader
                .read_until(b' ', &mut buf)
                .map_err(|e| Error::io(path, e))?;
            offset += k as u64;
            if buf.pop() != Some(b' ') {
                return Err(Error::format(loc(entry + 2, start), "unterminated word"));
            }
            let word = String::from_utf8_lossy(&buf).into_owned();
            reader.read_exact(&mut vec_buf).map_err(|_| {
                Error::format(loc(entry + 2, offset), "truncated vector")
            })?;
            offset += vec_buf.len() as u64;
            if let Some(slot) = want(&word) {
                let v: Vec<f64> = vec_buf
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                    .collect();
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::format(loc(entry + 2, start), "non-finite value"));
                }
                store(slot, v);
            }
        }
        return Ok(m);
    }

    let mut dim = declared.map(|(_, m)| m);
    let mut entries = 0usize;
    loop {
        buf.clear();
        let k = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io(path, e))?;
        if k == 0 {
            break;
        }
        line_no += 1;
        let start = offset;
        offset += k as u64;
        let text = String::from_utf8_lossy(&buf);
        let fields: Vec<&str> = text.split([' ', '\t', '\n', '\r']).filter(|s| !s.is_empty()).collect();
        if fields.is_empty() {
            continue;
        }
        let m = *dim.get_or_insert(fields.len() - 1);
        if m == 0 {
            return Err(Error::format(loc(line_no, start), "entry has no vector"));
        }
        // Words may contain spaces (some GloVe releases do); everything before
        // the last m fields is the word, as long as none of it looks numeric.
        if fields.len() < m + 1
            || fields[1..fields.len() - m].iter().any(|f| f.parse::<f64>().is_ok())
        {
            return Err(Error::DimensionMismatch {
                location: loc(line_no, start),
                expected: m,
                found: fields.len() - 1,
            });
        }
        let split = fields.len() - m;
        let word = fields[..split].join(" ");
        if let Some(slot) = want(&word) {
            let mut v = Vec::with_capacity(m);
            for f in &fields[split..] {
                let x: f64 = f.parse().map_err(|_| {
                    Error::format(loc(line_no, start), format!("bad number {f:?}"))
                })?;
                if !x.is_finite() {
                    return Err(Error::format(loc(line_no, start), "non-finite value"));
                }
                v.push(x);
            }
            store(slot, v);
        }
        entries += 1;
    }
    if let Some((n, _)) = declared {
        if n != entries {
            return Err(Error::format(
                loc(line_no, offset),
                format!("header declares {n} entries, file has {entries}"),
            ));
        }
    }
    dim.ok_or_else(|| Error::format(loc(line_no, offset), "no entries"))
}
