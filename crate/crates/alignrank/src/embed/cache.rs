//! Content-addressed vector cache: a directory of JSON files, one per key.
//!
//! Keys digest (provider_id, model_id, full document text), so any change to
//! the document or the model identity misses cleanly. Writes go through a
//! temporary file and an atomic rename, tolerating concurrent readers and
//! racing writers (identical keys always carry identical values).

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EmbeddingVector;

/// Stable cache key: hex SHA-256 over length-prefixed
/// (provider_id, model_id, text).
pub fn cache_key(provider_id: &str, model_id: &str, text: &str) -> String {
    let mut hasher = Sha256::new();
    for part in [provider_id, model_id, text] {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// On-disk cache entry.
#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    provider_id: String,
    model_id: String,
    dim: usize,
    values: Vec<f64>,
    /// Unix seconds at write time.
    created_at: u64,
}

/// Outcome of a cache lookup.
#[derive(Debug)]
pub enum CacheLookup {
    Hit(EmbeddingVector),
    Miss,
    /// The file exists but could not be used; the caller recomputes.
    Corrupt { key: String, message: String },
}

/// A directory-backed vector cache.
#[derive(Debug)]
pub struct VectorCache {
    dir: PathBuf,
}

static WRITE_COUNTER: AtomicU64 = AtomicU64::new(0);

impl VectorCache {
    /// Opens (creating if needed) a cache directory.
    pub fn open(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> CacheLookup {
        let path = self.path_for(key);
        let bytes = match fs::read(&path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return CacheLookup::Miss,
            Err(e) => {
                return CacheLookup::Corrupt {
                    key: key.to_string(),
                    message: e.to_string(),
                }
            }
        };
        let entry: CacheEntry = match serde_json::from_slice(&bytes) {
            Ok(entry) => entry,
            Err(e) => {
                return CacheLookup::Corrupt {
                    key: key.to_string(),
                    message: e.to_string(),
                }
            }
        };
        if entry.key != key || entry.dim != entry.values.len() {
            return CacheLookup::Corrupt {
                key: key.to_string(),
                message: "entry does not match its key".into(),
            };
        }
        match EmbeddingVector::new(entry.values, entry.provider_id, entry.model_id) {
            Ok(vector) => CacheLookup::Hit(vector),
            Err(e) => CacheLookup::Corrupt {
                key: key.to_string(),
                message: e.to_string(),
            },
        }
    }

    pub fn put(&self, key: &str, vector: &EmbeddingVector) -> std::io::Result<()> {
        let entry = CacheEntry {
            key: key.to_string(),
            provider_id: vector.provider_id().to_string(),
            model_id: vector.model_id().to_string(),
            dim: vector.dim(),
            values: vector.values().to_vec(),
            created_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let payload = serde_json::to_vec(&entry)?;
        let tmp = self.dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            WRITE_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, payload)?;
        match fs::rename(&tmp, self.path_for(key)) {
            Ok(()) => Ok(()),
            Err(e) => {
                fs::remove_file(&tmp).ok();
                Err(e)
            }
        }
    }

    /// Number of entries currently stored.
    pub fn len(&self) -> std::io::Result<usize> {
        let mut count = 0;
        for entry in fs::read_dir(&self.dir)? {
            let entry = entry?;
            if entry.path().extension().is_some_and(|e| e == "json") {
                count += 1;
            }
        }
        Ok(count)
    }

    pub fn is_empty(&self) -> std::io::Result<bool> {
        Ok(self.len()? == 0)
    }
}
