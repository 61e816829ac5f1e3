//! Content-addressed result cache: one JSON file per key, named by the
//! SHA-256 of the key's canonical serialization and the tool version.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the cache location.
pub const CACHE_DIR_ENV: &str = "HESSLAB_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub operation: String,
    pub n: usize,
    pub p: Option<u64>,
    pub jordan_type: String,
    pub m: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub value: serde_json::Value,
    pub tool_version: String,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

/// `$HESSLAB_CACHE_DIR`, else `$XDG_CACHE_HOME/hesslab`, else
/// `$HOME/.cache/hesslab`.
pub fn default_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_DIR_ENV) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(d).join("hesslab");
    }
    match std::env::var_os("HOME") {
        Some(h) => PathBuf::from(h).join(".cache").join("hesslab"),
        None => std::env::temp_dir().join("hesslab-cache"),
    }
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn digest(key: &CacheKey) -> String {
        let canonical = serde_json::to_string(&(key, TOOL_VERSION)).expect("key serializes");
        let hash = Sha256::digest(canonical.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", Cache::digest(key)))
    }

    /// The cached value, if present, readable, and written by this version
    /// for exactly this key.
    pub fn get(&self, key: &CacheKey) -> Option<serde_json::Value> {
        let text = fs::read_to_string(self.path_for(key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        (entry.key == *key && entry.tool_version == TOOL_VERSION).then_some(entry.value)
    }

    /// Writes through a temporary file and a rename, so readers never see a
    /// partial entry.
    pub fn put(&self, key: &CacheKey, value: &serde_json::Value) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = CacheEntry {
            key: key.clone(),
            value: value.clone(),
            tool_version: TOOL_VERSION.to_string(),
        };
        let target = self.path_for(key);
        let tmp = self.dir.join(format!(
            ".{}.{}.tmp",
            Cache::digest(key),
            std::process::id()
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(serde_json::to_string_pretty(&entry)?.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &target)?;
        Ok(())
    }

    pub fn entries(&self) -> Result<Vec<CacheEntry>> {
        let mut out = Vec::new();
        let dir = match fs::read_dir(&self.dir) {
            Ok(d) => d,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(e.into()),
        };
        for item in dir {
            let path = item?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            if let Ok(entry) = serde_json::from_str::<CacheEntry>(&fs::read_to_string(&path)?) {
                out.push(entry);
            }
        }
        out.sort_by(|a, b| {
            serde_json::to_string(&a.key)
                .unwrap_or_default()
                .cmp(&serde_json::to_string(&b.key).unwrap_or_default())
        });
        Ok(out)
    }

    /// Removes every entry; returns how many files went.
    pub fn clear(&self) -> Result<usize> {
        let mut removed = 0;
        let dir = match fs::read_dir(&self.dir) {
            Ok(d) => d,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        for item in dir {
            let path = item?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.ends_with(".json") || name.ends_with(".tmp") {
                fs::remove_file(&path)?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(p: u64) -> CacheKey {
        CacheKey {
            operation: "count".into(),
            n: 3,
            p: Some(p),
            jordan_type: "[[3]] @ [0]".into(),
            m: "2,3,3".into(),
        }
    }

    #[test]
    fn round_trip_and_clear() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        assert!(cache.get(&key(2)).is_none());
        let value = serde_json::json!({"total": 9, "per_cell": {"1,2,3": 1}});
        cache.put(&key(2), &value).unwrap();
        assert_eq!(cache.get(&key(2)), Some(value));
        assert!(cache.get(&key(3)).is_none());
        assert_eq!(cache.entries().unwrap().len(), 1);
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.get(&key(2)).is_none());
    }

    #[test]
    fn digest_depends_on_every_field() {
        let a = key(2);
        let mut b = key(2);
        b.m = "3,3,3".into();
        assert_ne!(Cache::digest(&a), Cache::digest(&b));
        assert_eq!(Cache::digest(&a).len(), 64);
    }
}
