use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use super::canonical;
use crate::error::{BankError, Result};

pub const SNAPSHOT_CRC_FIELD: &str = "snapshot_crc";

pub fn snapshot_path(dir: &Path, as_of_seq: u64) -> PathBuf {
    dir.join(format!("snapshot-{as_of_seq}.snap"))
}

/// Sequence numbers of the snapshot files in `dir`, ascending.
pub fn list_snapshots(dir: &Path) -> Result<Vec<u64>> {
    let mut seqs = Vec::new();
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(seq) = name
            .strip_prefix("snapshot-")
            .and_then(|s| s.strip_suffix(".snap"))
            .and_then(|s| s.parse::<u64>().ok())
        {
            seqs.push(seq);
        }
    }
    seqs.sort_unstable();
    Ok(seqs)
}

/// Writes `state` as of `as_of_seq` to a temporary file, syncs it, and
/// renames it into place.
pub fn write_snapshot<S: Serialize>(
    dir: &Path,
    state: &S,
    as_of_seq: u64,
    journal_last_seq: u64,
) -> Result<PathBuf> {
    if as_of_seq > journal_last_seq {
        return Err(BankError::validation(format!(
            "snapshot seq {as_of_seq} is beyond journal end {journal_last_seq}"
        )));
    }
    let state = serde_json::to_value(state).map_err(|e| BankError::internal(e.to_string()))?;
    let mut doc = Map::new();
    doc.insert("as_of_seq".into(), Value::from(as_of_seq));
    doc.insert("state".into(), state);
    let mut line = canonical::frame(&Value::Object(doc), SNAPSHOT_CRC_FIELD)?;
    line.push('\n');

    let final_path = snapshot_path(dir, as_of_seq);
    let tmp_path = dir.join(format!(".snapshot-{as_of_seq}.tmp"));
    {
        let mut tmp = File::create(&tmp_path)?;
        tmp.write_all(line.as_bytes())?;
        tmp.sync_all()?;
    }
    fs::rename(&tmp_path, &final_path)?;
    if let Ok(d) = File::open(dir) {
        let _ = d.sync_all();
    }
    Ok(final_path)
}

pub fn read_snapshot<S: DeserializeOwned>(path: &Path) -> Result<(u64, S)> {
    let bytes = fs::read(path)?;
    let line = bytes.strip_suffix(b"\n").unwrap_or(&bytes);
    let value = canonical::unframe(line, SNAPSHOT_CRC_FIELD)
        .map_err(|e| BankError::storage(format!("snapshot {}: {e:?}", path.display())))?;
    let as_of = value
        .get("as_of_seq")
        .and_then(Value::as_u64)
        .ok_or_else(|| BankError::storage("snapshot missing as_of_seq"))?;
    let state = value
        .get("state")
        .cloned()
        .ok_or_else(|| BankError::storage("snapshot missing state"))?;
    let state = serde_json::from_value(state).map_err(|e| BankError::storage(e.to_string()))?;
    Ok((as_of, state))
}
