//! In-memory reuse of expensive intermediates across runs of one process.
//!
//! Entries are keyed by a SHA-256 digest of the input bytes plus the settings
//! that shape the result, so two configs pointing at identical files share an
//! entry and an edited file never hits a stale one.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::SystemTime;

use sha2::{Digest, Sha256};

use crate::corpus::{Document, Vocabulary};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::evaluation::CooccurrenceIndex;

/// Tokenized documents and their train-split vocabulary.
#[derive(Debug)]
pub struct CorpusData {
    pub docs: Vec<Document>,
    pub vocab: Vocabulary,
}

/// Vectors aligned to the working vocabulary (the covered subset).
#[derive(Debug)]
pub struct LoadedEmbeddings {
    pub table: EmbeddingTable,
    pub vocab: Vocabulary,
}

type FileStamp = (PathBuf, u64, Option<SystemTime>);

#[derive(Default)]
pub struct Cache {
    enabled: bool,
    file_digests: HashMap<FileStamp, [u8; 32]>,
    pub(crate) corpora: HashMap<String, Arc<CorpusData>>,
    pub(crate) embeddings: HashMap<String, Arc<LoadedEmbeddings>>,
    pub(crate) indices: HashMap<String, Arc<CooccurrenceIndex>>,
}

impl Cache {
    pub fn new() -> Self {
        Cache {
            enabled: true,
            ..Default::default()
        }
    }

    /// A cache that stores nothing; every lookup recomputes.
    pub fn disabled() -> Self {
        Cache::default()
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    /// Digest of a file or, recursively and in sorted order, of a directory's
    /// relative paths and file contents. File digests are memoized by path,
    /// length and modification time.
    pub fn digest_path(&mut self, path: &Path) -> Result<String> {
        let mut h = Sha256::new();
        self.feed(path, path, &mut h)?;
        Ok(hex::encode(h.finalize()))
    }

    fn feed(&mut self, root: &Path, path: &Path, h: &mut Sha256) -> Result<()> {
        let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
        let rel = path.strip_prefix(root).unwrap_or(path).to_string_lossy().into_owned();
        if meta.is_dir() {
            h.update(b"d");
            h.update(rel.as_bytes());
            h.update([0]);
            let mut entries = fs::read_dir(path)
                .map_err(|e| Error::io(path, e))?
                .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(path, err)))
                .collect::<Result<Vec<_>>>()?;
            entries.sort();
            for e in entries {
                self.feed(root, &e, h)?;
            }
        } else {
            let stamp = (path.to_path_buf(), meta.len(), meta.modified().ok());
            let d = match self.file_digests.get(&stamp) {
                Some(d) => *d,
                None => {
                    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
                    let d: [u8; 32] = Sha256::digest(&bytes).into();
                    self.file_digests.insert(stamp, d);
                    d
                }
            };
            h.update(b"f");
            h.update(rel.as_bytes());
            h.update([0]);
            h.update(d);
        }
        Ok(())
    }

    /// Returns the cached value under `key`, or computes and (if enabled) stores it.
    pub(crate) fn get_or<T>(
        enabled: bool,
        map: &mut HashMap<String, Arc<T>>,
        key: Option<String>,
        make: impl FnOnce() -> Result<T>,
    ) -> Result<Arc<T>> {
        if let Some(k) = key.as_ref().filter(|_| enabled) {
            if let Some(v) = map.get(k) {
                return Ok(Arc::clone(v));
            }
        }
        let v = Arc::new(make()?);
        if let Some(k) = key.filter(|_| enabled) {
            map.insert(k, Arc::clone(&v));
        }
        Ok(v)
    }
}

/// Joins key parts unambiguously.
pub(crate) fn key(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}
