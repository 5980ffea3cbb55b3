//! Content-addressed on-disk cache.
//!
//! An entry for key `k` lives in `<sha256(k)>.<ext>` and starts with a
//! `#sha256:<hex>` line hashing the body, then `#key:<k>`, then the body.
//! Entries whose body no longer matches the header are treated as misses.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::polyring::{CommPoly, VarSet};

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub corrupt: u64,
    pub writes: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug)]
pub struct CacheStore {
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
    corrupt: AtomicU64,
    writes: AtomicU64,
}

impl CacheStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| CacheError::Io { path: dir.clone(), source })?;
        Ok(CacheStore {
            dir,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            corrupt: AtomicU64::new(0),
            writes: AtomicU64::new(0),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{ext}", sha256_hex(key.as_bytes())))
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            corrupt: self.corrupt.load(Ordering::Relaxed),
            writes: self.writes.load(Ordering::Relaxed),
        }
    }

    /// Body of a valid entry, `None` on a miss or a corrupted entry.
    pub fn get(&self, key: &str, ext: &str) -> Option<String> {
        let Ok(text) = fs::read_to_string(self.path_for(key, ext)) else {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return None;
        };
        match parse_entry(&text, key) {
            Some(body) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(body.to_string())
            }
            None => {
                self.corrupt.fetch_add(1, Ordering::Relaxed);
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    /// Writes atomically through a temporary file in the same directory.
    pub fn put(&self, key: &str, ext: &str, body: &str) -> Result<(), CacheError> {
        let path = self.path_for(key, ext);
        let io = |source| CacheError::Io { path: path.clone(), source };
        let text = format!("#sha256:{}\n#key:{key}\n{body}", sha256_hex(body.as_bytes()));
        let tmp = path.with_extension(format!("{ext}.tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        self.writes.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    pub fn get_poly(&self, key: &str, vars: &Arc<VarSet>) -> Option<CommPoly> {
        let body = self.get(key, "poly")?;
        match CommPoly::from_canonical_text(vars, &body) {
            Ok(p) => Some(p),
            Err(_) => {
                self.corrupt.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    pub fn put_poly(&self, key: &str, p: &CommPoly) -> Result<(), CacheError> {
        self.put(key, "poly", &p.to_canonical_text())
    }

    pub fn get_json(&self, key: &str) -> Option<serde_json::Value> {
        let body = self.get(key, "json")?;
        match serde_json::from_str(&body) {
            Ok(v) => Some(v),
            Err(_) => {
                self.corrupt.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    pub fn put_json(&self, key: &str, v: &serde_json::Value) -> Result<(), CacheError> {
        self.put(key, "json", &serde_json::to_string_pretty(v).expect("json values serialize"))
    }
}

fn parse_entry<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let (h, rest) = text.split_once('\n')?;
    let (k, body) = rest.split_once('\n').unwrap_or((rest, ""));
    let hash = h.strip_prefix("#sha256:")?;
    (k.strip_prefix("#key:")? == key && sha256_hex(body.as_bytes()) == hash).then_some(body)
}
