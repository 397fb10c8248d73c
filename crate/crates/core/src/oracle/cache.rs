//! Persistent utility cache.
//!
//! Keyed by `(case_id, model_id, coalition_bits)`, backed by an
//! append-only JSONL file so interrupted runs lose at most the record
//! being written. Concurrent requests for the same key block until the
//! first computation lands, so an expensive evaluation is paid for at
//! most once per process *and* at most once across process restarts.

use super::{OracleError, ScoredUtility};
use crate::case::UtilityRecord;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Condvar, Mutex};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub case_id: String,
    pub model_id: String,
    pub bits: u32,
}

struct CacheState {
    values: HashMap<CacheKey, (f64, u32)>,
    inflight: HashSet<CacheKey>,
}

/// What `UtilityCache::open` found in an existing cache file.
#[derive(Debug, Clone, Default)]
pub struct CacheLoadStats {
    pub records: usize,
    /// 1-based line numbers that failed to parse and were skipped.
    pub corrupt_lines: Vec<usize>,
}

pub struct UtilityCache {
    state: Mutex<CacheState>,
    ready: Condvar,
    sink: Option<Mutex<BufWriter<File>>>,
    path: Option<PathBuf>,
}

fn cache_err(path: &Path, msg: impl std::fmt::Display) -> OracleError {
    OracleError::Cache { path: path.display().to_string(), msg: msg.to_string() }
}

impl UtilityCache {
    /// Cache with no backing file; entries live for the process only.
    pub fn in_memory() -> Self {
        Self {
            state: Mutex::new(CacheState { values: HashMap::new(), inflight: HashSet::new() }),
            ready: Condvar::new(),
            sink: None,
            path: None,
        }
    }

    /// Open (or create) a JSONL-backed cache. Unparseable lines are
    /// skipped and reported, never fatal: a crash mid-append must not
    /// poison the rest of the file.
    pub fn open(path: &Path) -> Result<(Self, CacheLoadStats), OracleError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| cache_err(path, e))?;
            }
        }
        let mut values = HashMap::new();
        let mut stats = CacheLoadStats::default();
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(|e| cache_err(path, e))?);
            for (idx, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| cache_err(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<UtilityRecord>(&line) {
                    Ok(rec) => {
                        values.insert(
                            CacheKey {
                                case_id: rec.case_id,
                                model_id: rec.model_id,
                                bits: rec.coalition_bits,
                            },
                            (rec.value, rec.token_count),
                        );
                        stats.records += 1;
                    }
                    Err(_) => stats.corrupt_lines.push(idx + 1),
                }
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| cache_err(path, e))?;
        Ok((
            Self {
                state: Mutex::new(CacheState { values, inflight: HashSet::new() }),
                ready: Condvar::new(),
                sink: Some(Mutex::new(BufWriter::new(file))),
                path: Some(path.to_path_buf()),
            },
            stats,
        ))
    }

    pub fn len(&self) -> usize {
        self.state.lock().unwrap().values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, key: &CacheKey) -> bool {
        self.state.lock().unwrap().values.contains_key(key)
    }

    /// Look up `key`, running `compute` on a miss. If another thread is
    /// already computing the same key, block until its result is cached
    /// instead of computing again. A failed computation releases the key
    /// so a later caller can retry.
    pub fn get_or_compute(
        &self,
        key: CacheKey,
        compute: impl FnOnce() -> Result<ScoredUtility, OracleError>,
    ) -> Result<f64, OracleError> {
        {
            let mut state = self.state.lock().unwrap();
            loop {
                if let Some(&(value, _)) = state.values.get(&key) {
                    return Ok(value);
                }
                if state.inflight.contains(&key) {
                    state = self.ready.wait(state).unwrap();
                    continue;
                }
                state.inflight.insert(key.clone());
                break;
            }
        }
        let outcome = compute();
        let mut state = self.state.lock().unwrap();
        state.inflight.remove(&key);
        let result = match outcome {
            Ok(scored) => {
                state.values.insert(key.clone(), (scored.value, scored.token_count));
                self.append(&key, scored)?;
                Ok(scored.value)
            }
            Err(e) => Err(e),
        };
        self.ready.notify_all();
        result
    }

    fn append(&self, key: &CacheKey, scored: ScoredUtility) -> Result<(), OracleError> {
        let Some(sink) = &self.sink else { return Ok(()) };
        let path = self.path.as_deref().unwrap_or_else(|| Path::new("<memory>"));
        let record = UtilityRecord {
            case_id: key.case_id.clone(),
            model_id: key.model_id.clone(),
            coalition_bits: key.bits,
            value: scored.value,
            token_count: scored.token_count,
        };
        let line = serde_json::to_string(&record).map_err(|e| cache_err(path, e))?;
        let mut sink = sink.lock().unwrap();
        writeln!(sink, "{line}").map_err(|e| cache_err(path, e))?;
        // Flush per record: a killed run keeps everything it paid for.
        sink.flush().map_err(|e| cache_err(path, e))
    }
}

/// Aggregate statistics for one `(case_id, model_id)` group in a cache
/// file, as reported by [`scan_cache_file`].
#[derive(Debug, Clone)]
pub struct GroupStats {
    pub records: usize,
    /// Smallest player count consistent with the stored coalitions
    /// (bit length of the largest mask seen).
    pub inferred_n: usize,
    pub value_min: f64,
    pub value_max: f64,
    pub token_total: u64,
}

/// Offline summary of a cache file, for inspection tooling.
#[derive(Debug, Clone, Default)]
pub struct CacheScan {
    pub total_records: usize,
    /// `(line_number, snippet)` for lines that failed to parse.
    pub corrupt: Vec<(usize, String)>,
    pub groups: BTreeMap<(String, String), GroupStats>,
}

/// Read a cache file without opening it for writing.
pub fn scan_cache_file(path: &Path) -> Result<CacheScan, OracleError> {
    let reader = BufReader::new(File::open(path).map_err(|e| cache_err(path, e))?);
    let mut scan = CacheScan::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| cache_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: UtilityRecord = match serde_json::from_str(&line) {
            Ok(rec) => rec,
            Err(_) => {
                let snippet: String = line.chars().take(40).collect();
                scan.corrupt.push((idx + 1, snippet));
                continue;
            }
        };
        scan.total_records += 1;
        let bits_len = (32 - rec.coalition_bits.leading_zeros()) as usize;
        let entry = scan
            .groups
            .entry((rec.case_id, rec.model_id))
            .or_insert(GroupStats {
                records: 0,
                inferred_n: 0,
                value_min: f64::INFINITY,
                value_max: f64::NEG_INFINITY,
                token_total: 0,
            });
        entry.records += 1;
        entry.inferred_n = entry.inferred_n.max(bits_len.max(1));
        entry.value_min = entry.value_min.min(rec.value);
        entry.value_max = entry.value_max.max(rec.value);
        entry.token_total += u64::from(rec.token_count);
    }
    Ok(scan)
}
