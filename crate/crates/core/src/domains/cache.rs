use std::collections::{BTreeMap, HashMap};
use std::fs::OpenOptions;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use super::pagerank::{DomainRank, RankSource};

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

/// Line-oriented rank cache: `pld,rank_value,rank_position,fetched_at` with
/// empty fields for missing values. New results are appended; when a domain
/// appears more than once the last line wins.
#[derive(Debug, Default)]
pub struct RankCache {
    path: Option<PathBuf>,
    entries: HashMap<String, DomainRank>,
}

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(source)
}

impl RankCache {
    pub fn in_memory() -> Self {
        RankCache::default()
    }

    /// Loads the cache file, skipping entries older than `ttl` relative to
    /// `now` (seconds since the epoch). A missing file is an empty cache.
    pub fn open(path: &Path, ttl: Option<Duration>, now: u64) -> Result<Self, CacheError> {
        let mut cache = RankCache {
            path: Some(path.to_path_buf()),
            entries: HashMap::new(),
        };
        let file = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(source) => {
                return Err(CacheError::Io {
                    path: path.to_path_buf(),
                    source,
                })
            }
        };
        let bad = |line: u64, message: String| CacheError::Format {
            path: path.to_path_buf(),
            line,
            message,
        };
        for (i, row) in csv_reader(file).records().enumerate() {
            let line = i as u64 + 1;
            let row = row.map_err(|e| bad(line, e.to_string()))?;
            if row.len() != 4 {
                return Err(bad(line, format!("expected 4 fields, found {}", row.len())));
            }
            let opt = |s: &str| -> Result<Option<f64>, CacheError> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .map(Some)
                        .ok_or_else(|| bad(line, format!("not a number: {s:?}")))
                }
            };
            let fetched_at: u64 = row[3].parse().map_err(|_| bad(line, format!("bad timestamp {:?}", &row[3])))?;
            if ttl.is_some_and(|ttl| now.saturating_sub(fetched_at) > ttl.as_secs()) {
                cache.entries.remove(&row[0]);
                continue;
            }
            cache.entries.insert(
                row[0].to_string(),
                DomainRank {
                    pld: row[0].to_string(),
                    rank_value: opt(&row[1])?,
                    rank_position: opt(&row[2])?.map(|p| p as u64),
                    fetched_at,
                    source: RankSource::Cache,
                },
            );
        }
        Ok(cache)
    }

    pub fn get(&self, pld: &str) -> Option<&DomainRank> {
        self.entries.get(pld)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, rank: DomainRank) {
        self.entries.insert(rank.pld.clone(), rank);
    }

    /// Records new ranks and appends them to the backing file, if any.
    pub fn insert_all(&mut self, ranks: &[DomainRank]) -> Result<(), CacheError> {
        for r in ranks {
            self.insert(r.clone());
        }
        let Some(path) = &self.path else {
            return Ok(());
        };
        let io = |source| CacheError::Io {
            path: path.clone(),
            source,
        };
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        for r in ranks {
            let value = r.rank_value.map(|v| v.to_string()).unwrap_or_default();
            let position = r.rank_position.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([r.pld.as_str(), &value, &position, &r.fetched_at.to_string()])
                .map_err(|e| io(e.into()))?;
        }
        w.flush().map_err(io)
    }
}

/// Reads an offline `pld,rank` snapshot. A header row is allowed.
pub fn load_offline_ranks(path: &Path) -> Result<BTreeMap<String, f64>, CacheError> {
    let file = std::fs::File::open(path).map_err(|source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BTreeMap::new();
    for (i, row) in csv_reader(file).records().enumerate() {
        let line = i as u64 + 1;
        let bad = |message: String| CacheError::Format {
            path: path.to_path_buf(),
            line,
            message,
        };
        let row = row.map_err(|e| bad(e.to_string()))?;
        if row.len() < 2 {
            return Err(bad("expected pld,rank".into()));
        }
        let (pld, rank) = (row[0].trim(), row[1].trim());
        match rank.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                out.insert(pld.to_ascii_lowercase(), v);
            }
            _ if line == 1 => {}
            _ => return Err(bad(format!("not a number: {rank:?}"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank(pld: &str, v: Option<f64>, at: u64) -> DomainRank {
        DomainRank {
            pld: pld.into(),
            rank_value: v,
            rank_position: v.map(|_| 7),
            fetched_at: at,
            source: RankSource::Api,
        }
    }

    #[test]
    fn append_and_reload_with_ttl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ranks.csv");
        let mut cache = RankCache::open(&path, None, 0).unwrap();
        cache.insert_all(&[rank("a.com", Some(3.5), 100), rank("b.com", None, 100)]).unwrap();
        cache.insert_all(&[rank("a.com", Some(4.0), 200)]).unwrap();

        let all = RankCache::open(&path, None, 1000).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all.get("a.com").unwrap().rank_value, Some(4.0));
        assert_eq!(all.get("b.com").unwrap().rank_value, None);

        let fresh = RankCache::open(&path, Some(Duration::from_secs(150)), 300).unwrap();
        assert_eq!(fresh.len(), 1);
        assert!(fresh.get("b.com").is_none());
    }

    #[test]
    fn offline_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ranks.csv");
        std::fs::write(&path, "pld,rank\nA.com,3\nb.com,7.5\n").unwrap();
        let ranks = load_offline_ranks(&path).unwrap();
        assert_eq!(ranks, BTreeMap::from([("a.com".into(), 3.0), ("b.com".into(), 7.5)]));
        std::fs::write(&path, "a.com,3\nb.com,x\n").unwrap();
        assert!(load_offline_ranks(&path).is_err());
    }
}
