//! Loaders for snapshot, descriptor and user-count records.
//!
//! A path may be a single file or a directory; directories are read in file
//! name order, considering only `.json` and `.jsonl` files. A file holds
//! either one JSON document (an object or an array of objects) or one JSON
//! object per line.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use super::{ConsensusSnapshot, DescriptorRecord, UserCountRecord};
use crate::error::{Error, Result};

fn input_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_dir() {
        let mut files = Vec::new();
        for entry in std::fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            let p = entry.path();
            let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
            if p.is_file() && (ext == "json" || ext == "jsonl") {
                files.push(p);
            }
        }
        files.sort();
        Ok(files)
    } else if path.exists() {
        Ok(vec![path.to_path_buf()])
    } else {
        Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        ))
    }
}

fn parse_records<T: DeserializeOwned>(text: &str, file: &Path) -> Result<Vec<T>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str(text).map_err(|e| {
            Error::parse(
                format!("{} line {}", file.display(), e.line()),
                e,
            )
        });
    }
    // A single (possibly multi-line) object, else JSON lines.
    if let Ok(one) = serde_json::from_str::<T>(text) {
        return Ok(vec![one]);
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(line)
            .map_err(|e| Error::parse(format!("{} line {}", file.display(), i + 1), e))?;
        out.push(rec);
    }
    Ok(out)
}

fn load_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for file in input_files(path)? {
        let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        out.extend(parse_records(&text, &file)?);
    }
    Ok(out)
}

fn normalize_country(cc: &str, context: &str) -> Result<String> {
    let cc = cc.to_ascii_lowercase();
    if cc.len() != 2 || !cc.bytes().all(|b| b.is_ascii_lowercase()) {
        return Err(Error::Schema(format!("{context}: bad country code {cc:?}")));
    }
    Ok(cc)
}

/// Loads snapshots sorted by timestamp. Duplicate timestamps are an error.
pub fn load_snapshots(path: &Path) -> Result<Vec<ConsensusSnapshot>> {
    let mut snapshots: Vec<ConsensusSnapshot> = load_records(path)?;
    snapshots.sort_by_key(|s| s.timestamp);
    for pair in snapshots.windows(2) {
        if pair[0].timestamp == pair[1].timestamp {
            return Err(Error::DuplicateTimestamp(pair[0].timestamp));
        }
    }
    for snap in &mut snapshots {
        let mut seen = HashSet::new();
        for relay in &mut snap.relays {
            let context = format!("snapshot {} relay {}", snap.timestamp, relay.fingerprint);
            if !seen.insert(relay.fingerprint.clone()) {
                return Err(Error::Schema(format!("{context}: duplicate fingerprint")));
            }
            if !(relay.weight >= 0.0) {
                return Err(Error::Schema(format!("{context}: negative weight")));
            }
            relay.country = normalize_country(&relay.country, &context)?;
        }
    }
    Ok(snapshots)
}

pub fn load_descriptors(path: &Path) -> Result<Vec<DescriptorRecord>> {
    let records: Vec<DescriptorRecord> = load_records(path)?;
    for d in &records {
        if !(d.observed_bandwidth >= 0.0 && d.bandwidth_rate >= 0.0 && d.bandwidth_burst >= 0.0) {
            return Err(Error::Schema(format!(
                "descriptor {}: negative bandwidth value",
                d.fingerprint
            )));
        }
    }
    Ok(records)
}

pub fn load_user_counts(path: &Path) -> Result<Vec<UserCountRecord>> {
    let mut records: Vec<UserCountRecord> = load_records(path)?;
    for r in &mut records {
        r.country = normalize_country(&r.country, &format!("user count {}", r.date))?;
    }
    Ok(records)
}
