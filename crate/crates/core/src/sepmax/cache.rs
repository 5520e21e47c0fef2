use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{seesaw_max, SeesawSettings};
use crate::error::Result;
use crate::witness::WitnessOperator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SepMaxCacheEntry {
    pub max_value: f64,
    pub restarts: usize,
    pub seed: u64,
    pub converged: bool,
}

/// `family(p1,p2,...)`, with shortest round-trip formatting of the parameters.
pub fn cache_key(family: &str, params: &[f64]) -> String {
    let ps: Vec<String> = params.iter().map(|p| p.to_string()).collect();
    format!("{family}({})", ps.join(","))
}

/// JSON sidecar of see-saw results keyed by witness family and parameters.
#[derive(Debug, Default)]
pub struct SepMaxCache {
    path: Option<PathBuf>,
    entries: BTreeMap<String, SepMaxCacheEntry>,
}

impl SepMaxCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens `path`, starting empty if the file does not exist yet.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = if path.exists() {
            serde_json::from_str(&fs::read_to_string(&path)?)?
        } else {
            BTreeMap::new()
        };
        Ok(SepMaxCache { path: Some(path), entries })
    }

    pub fn get(&self, key: &str) -> Option<&SepMaxCacheEntry> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: String, entry: SepMaxCacheEntry) {
        self.entries.insert(key, entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn save(&self) -> Result<()> {
        if let Some(p) = &self.path {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, serde_json::to_string_pretty(&self.entries)? + "\n")?;
        }
        Ok(())
    }

    /// Cached value for `w`, solving and recording it on a miss. Entries
    /// computed under different restart or seed settings are recomputed.
    pub fn get_or_solve(&mut self, w: &WitnessOperator, settings: &SeesawSettings) -> Result<f64> {
        let key = cache_key(w.family(), w.params());
        if let Some(e) = self.entries.get(&key) {
            if e.restarts == settings.restarts && e.seed == settings.seed {
                return Ok(e.max_value);
            }
        }
        let r = seesaw_max(&w.squared(), w.dims(), settings)?;
        self.entries.insert(
            key,
            SepMaxCacheEntry {
                max_value: r.max_value,
                restarts: r.restarts_used,
                seed: settings.seed,
                converged: r.converged,
            },
        );
        Ok(r.max_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::wl_p;

    #[test]
    fn sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("sepmax.json");
        let s = SeesawSettings { restarts: 4, ..Default::default() };
        let mut c = SepMaxCache::open(&path).unwrap();
        assert!(c.is_empty());
        let v = c.get_or_solve(&wl_p(0.3).unwrap(), &s).unwrap();
        c.save().unwrap();
        let c2 = SepMaxCache::open(&path).unwrap();
        assert_eq!(c2.get(&cache_key("wl_p", &[0.3])).unwrap().max_value, v);
        assert_eq!(cache_key("wl_p", &[0.3]), "wl_p(0.3)");
    }
}
