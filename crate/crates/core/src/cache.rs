//! On-disk store of finished index reports.
//!
//! Files are named by the canonical key `p-q-n-vK`. A file that cannot be
//! read or parsed is a miss, never an error.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::pipeline::IndexReport;

/// Bumped whenever the numerics change in a way that can alter a report.
pub const CACHE_VERSION: u32 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "OTSUKI_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub p: u32,
    pub q: u32,
    pub n: usize,
    pub version: u32,
}

impl CacheKey {
    pub fn new(p: u32, q: u32, n: usize) -> Self {
        CacheKey { p, q, n, version: CACHE_VERSION }
    }

    pub fn canonical(&self) -> String {
        format!("{}-{}-{}-v{}", self.p, self.q, self.n, self.version)
    }
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The directory from `OTSUKI_CACHE`, else `./.cache`.
    pub fn from_env() -> Self {
        Cache::new(std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(".cache"), PathBuf::from))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.canonical()))
    }

    /// Write `report`, creating the directory on demand.
    pub fn store(&self, key: &CacheKey, report: &IndexReport) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(key);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(report)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// The stored report, or `None` on a miss. Corrupt files are logged and
    /// treated as misses.
    pub fn load(&self, key: &CacheKey) -> Option<IndexReport> {
        let path = self.path(key);
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<IndexReport>(&text) {
            Ok(report) if (report.p, report.q, report.n, report.version) == (key.p, key.q, key.n, key.version) => Some(report),
            Ok(_) => {
                log::warn!("cache file {} does not match its key; ignoring", path.display());
                None
            }
            Err(e) => {
                log::warn!("corrupt cache file {}: {e}; ignoring", path.display());
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_key() {
        assert_eq!(CacheKey::new(2, 3, 4096).canonical(), format!("2-3-4096-v{CACHE_VERSION}"));
    }

    #[test]
    fn corrupt_file_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("nested"));
        let key = CacheKey::new(2, 3, 128);
        assert!(cache.load(&key).is_none());
        fs::create_dir_all(cache.dir()).unwrap();
        fs::write(cache.path(&key), "{ not json").unwrap();
        assert!(cache.load(&key).is_none());
    }
}
