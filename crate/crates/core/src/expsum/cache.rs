//! On-disk histogram cache. One immutable JSON file per
//! (p, a, h, f, k, N_eff); a file that fails to parse or does not match its
//! key is ignored and recomputed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::find_irreducible;

use super::{TowerSpec, TraceHistogram};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
struct CacheFile {
    p: u64,
    a: usize,
    h: Vec<u64>,
    f: Vec<Vec<u64>>,
    k: usize,
    #[serde(rename = "N_eff")]
    n_eff: u32,
    zero_cell: u64,
    counts: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheEntry {
    pub path: PathBuf,
    pub p: u64,
    pub a: usize,
    pub k: usize,
    pub n_eff: u32,
    pub bytes: u64,
}

#[derive(Debug, Clone)]
pub struct HistogramCache {
    dir: PathBuf,
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

impl HistogramCache {
    pub fn new(dir: PathBuf) -> Self {
        HistogramCache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn key(spec: &TowerSpec, k: usize, n_eff: u32) -> (Vec<u64>, Vec<Vec<u64>>, String) {
        let h = find_irreducible(spec.p, spec.a * k);
        let f: Vec<Vec<u64>> = spec.f.iter().map(|b| b.0.clone()).collect();
        let fs: Vec<String> = f.iter().map(|c| c.iter().map(u64::to_string).collect::<Vec<_>>().join("_")).collect();
        let name = format!("hist-p{}-a{}-k{}-n{}-f{}.json", spec.p, spec.a, k, n_eff, fs.join("."));
        (h, f, name)
    }

    pub fn load(&self, spec: &TowerSpec, k: usize, n_eff: u32) -> Option<TraceHistogram> {
        let (h, f, name) = Self::key(spec, k, n_eff);
        let text = fs::read_to_string(self.dir.join(name)).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if (file.p, file.a, &file.h, &file.f, file.k, file.n_eff) != (spec.p, spec.a, &h, &f, k, n_eff) {
            return None;
        }
        let mut counts = BTreeMap::new();
        for (t, c) in file.counts {
            counts.insert(t.parse().ok()?, c);
        }
        Some(TraceHistogram { p: spec.p, k, n_eff, counts, zero_cell: file.zero_cell })
    }

    pub fn store(&self, spec: &TowerSpec, hist: &TraceHistogram) -> Result<()> {
        let (h, f, name) = Self::key(spec, hist.k, hist.n_eff);
        let path = self.dir.join(&name);
        if path.exists() {
            return Ok(());
        }
        fs::create_dir_all(&self.dir).map_err(io)?;
        let file = CacheFile {
            p: spec.p,
            a: spec.a,
            h,
            f,
            k: hist.k,
            n_eff: hist.n_eff,
            zero_cell: hist.zero_cell,
            counts: hist.counts.iter().map(|(t, c)| (t.to_string(), *c)).collect(),
        };
        let text = serde_json::to_string(&file).map_err(|e| Error::Io(e.to_string()))?;
        let tmp = self.dir.join(format!(".{name}.{}.tmp", std::process::id()));
        fs::write(&tmp, text).map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        Ok(())
    }

    pub fn list(&self) -> Result<Vec<CacheEntry>> {
        let mut out = Vec::new();
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(io(e)),
        };
        for entry in rd {
            let entry = entry.map_err(io)?;
            let path = entry.path();
            if !is_cache_file(&path) {
                continue;
            }
            let bytes = entry.metadata().map_err(io)?.len();
            if let Some(file) = fs::read_to_string(&path).ok().and_then(|t| serde_json::from_str::<CacheFile>(&t).ok())
            {
                out.push(CacheEntry { path, p: file.p, a: file.a, k: file.k, n_eff: file.n_eff, bytes });
            }
        }
        out.sort_by(|x, y| x.path.cmp(&y.path));
        Ok(out)
    }

    /// Remove every cache file; returns how many were deleted.
    pub fn purge(&self) -> Result<usize> {
        let mut n = 0;
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(io(e)),
        };
        for entry in rd {
            let path = entry.map_err(io)?.path();
            if is_cache_file(&path) {
                fs::remove_file(&path).map_err(io)?;
                n += 1;
            }
        }
        Ok(n)
    }
}

fn is_cache_file(path: &Path) -> bool {
    path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("hist-") && n.ends_with(".json"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::{trace_histogram, Precision};
    use crate::par::Strategy;

    #[test]
    fn round_trip_and_purge() {
        let dir = tempfile::tempdir().unwrap();
        let cache = HistogramCache::new(dir.path().to_path_buf());
        let spec = TowerSpec::over_fp(3, &[1, 0, 1], Precision::new(3, 3, 4, 2)).unwrap();
        let h = trace_histogram(&spec, 3, 4, 1000, Strategy::Sequential).unwrap();
        assert!(cache.load(&spec, 3, 4).is_none());
        cache.store(&spec, &h).unwrap();
        assert_eq!(cache.load(&spec, 3, 4), Some(h.clone()));
        assert!(cache.load(&spec, 3, 5).is_none());
        let other = TowerSpec::over_fp(3, &[1, 0, 2], spec.prec).unwrap();
        assert!(cache.load(&other, 3, 4).is_none());
        let listed = cache.list().unwrap();
        assert_eq!(listed.len(), 1);
        assert_eq!((listed[0].p, listed[0].k, listed[0].n_eff), (3, 3, 4));
        assert_eq!(cache.purge().unwrap(), 1);
        assert!(cache.list().unwrap().is_empty());
    }

    #[test]
    fn corrupt_file_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let cache = HistogramCache::new(dir.path().to_path_buf());
        let spec = TowerSpec::over_fp(2, &[1, 0, 0, 0], Precision::new(2, 3, 4, 2)).unwrap();
        let (_, _, name) = HistogramCache::key(&spec, 1, 3);
        fs::write(dir.path().join(name), "{not json").unwrap();
        assert!(cache.load(&spec, 1, 3).is_none());
    }
}
