//! Data tier: the append-only checksummed journal, snapshots, and crash
//! recovery.
//!
//! The journal is the source of truth. Any state type that can apply
//! journal records in order ([`Replayable`]) can be rebuilt from it, with a
//! snapshot as an optional starting point.

mod canonical;
mod journal;
mod snapshot;

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

pub use canonical::{frame, to_canonical, unframe, FrameError};
pub use journal::{
    corrupt_seq, scan, Journal, JournalRecord, PendingRecord, ScannedJournal, CRC_FIELD,
    JOURNAL_FILE,
};
pub use snapshot::{list_snapshots, read_snapshot, snapshot_path, write_snapshot, SNAPSHOT_CRC_FIELD};

use crate::error::{BankError, ErrorCode, Result};

/// State that is a deterministic fold over journal records.
pub trait Replayable: Default + Serialize + DeserializeOwned {
    fn apply(&mut self, record: &JournalRecord) -> Result<()>;

    /// Rebuilds derived, unserialized fields after loading from a snapshot.
    fn after_load(&mut self) {}
}

#[derive(Debug)]
pub struct Replayed<S> {
    pub state: S,
    pub last_seq: u64,
    pub valid_len: u64,
    pub torn_tail: bool,
}

fn apply_checked<S: Replayable>(state: &mut S, record: &JournalRecord) -> Result<()> {
    state.apply(record).map_err(|err| {
        BankError::new(
            ErrorCode::CorruptRecord,
            format!("CORRUPT_RECORD({}): {}", record.seq, err.message),
        )
    })
}

/// Rebuilds state from journal bytes, starting at genesis.
pub fn replay<S: Replayable>(bytes: &[u8]) -> Result<Replayed<S>> {
    let scanned = scan(bytes)?;
    let mut state = S::default();
    for record in &scanned.records {
        apply_checked(&mut state, record)?;
    }
    Ok(Replayed {
        state,
        last_seq: scanned.records.len() as u64,
        valid_len: scanned.valid_len,
        torn_tail: scanned.torn_tail,
    })
}

#[derive(Debug)]
pub struct Recovered<S> {
    pub state: S,
    pub next_seq: u64,
    /// Verified journal length; bytes past it are a torn tail.
    pub valid_len: u64,
    pub snapshot_seq: Option<u64>,
    pub torn_tail: bool,
}

/// Loads the newest valid snapshot (if any) from `data_dir`, replays the
/// journal tail after it, and returns state ready to serve.
///
/// Snapshots that fail their checksum or point past the journal end are
/// skipped. The whole journal is verified either way.
pub fn recover<S: Replayable>(data_dir: &Path) -> Result<Recovered<S>> {
    if !data_dir.is_dir() {
        return Err(BankError::storage(format!(
            "data directory {} does not exist",
            data_dir.display()
        )));
    }
    let journal_path = data_dir.join(JOURNAL_FILE);
    let bytes = match std::fs::read(&journal_path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let scanned = scan(&bytes)?;
    let last_seq = scanned.records.len() as u64;

    let mut start: Option<(u64, S)> = None;
    for seq in list_snapshots(data_dir)?.into_iter().rev() {
        if seq > last_seq {
            tracing::warn!(seq, last_seq, "ignoring snapshot beyond journal end");
            continue;
        }
        match read_snapshot::<S>(&snapshot_path(data_dir, seq)) {
            Ok((as_of, mut state)) if as_of == seq => {
                state.after_load();
                start = Some((seq, state));
                break;
            }
            Ok(_) => tracing::warn!(seq, "snapshot name and contents disagree; ignoring"),
            Err(err) => tracing::warn!(seq, %err, "ignoring unreadable snapshot"),
        }
    }

    let (snapshot_seq, mut state) = match start {
        Some((seq, state)) => (Some(seq), state),
        None => (None, S::default()),
    };
    let from = snapshot_seq.unwrap_or(0);
    for record in scanned.records.iter().filter(|r| r.seq > from) {
        apply_checked(&mut state, record)?;
    }
    Ok(Recovered {
        state,
        next_seq: last_seq + 1,
        valid_len: scanned.valid_len,
        snapshot_seq,
        torn_tail: scanned.torn_tail,
    })
}
