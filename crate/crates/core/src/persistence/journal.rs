//! Append-only journal: one framed canonical record per line.

use std::fs::{File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use super::canonical::{self, FrameError};
use crate::clock::Millis;
use crate::error::{BankError, ErrorCode, Result};

pub const JOURNAL_FILE: &str = "journal.log";
pub const CRC_FIELD: &str = "crc";

/// A durable, sequence-numbered event.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalRecord {
    pub seq: u64,
    pub ts: Millis,
    pub kind: String,
    pub payload: Value,
}

impl JournalRecord {
    /// The framed line for this record, without the trailing newline.
    pub fn encode(&self) -> Result<String> {
        let mut map = Map::new();
        map.insert("kind".into(), Value::String(self.kind.clone()));
        map.insert("payload".into(), self.payload.clone());
        map.insert("seq".into(), Value::from(self.seq));
        map.insert("ts".into(), Value::from(self.ts));
        canonical::frame(&Value::Object(map), CRC_FIELD)
    }

    pub fn decode(line: &[u8]) -> std::result::Result<Self, FrameError> {
        let value = canonical::unframe(line, CRC_FIELD)?;
        let Value::Object(mut map) = value else {
            return Err(FrameError::Shape);
        };
        if map.len() != 4 {
            return Err(FrameError::Shape);
        }
        let seq = map.get("seq").and_then(Value::as_u64).ok_or(FrameError::Shape)?;
        let ts = map.get("ts").and_then(Value::as_u64).ok_or(FrameError::Shape)?;
        let kind = match map.remove("kind") {
            Some(Value::String(k)) => k,
            _ => return Err(FrameError::Shape),
        };
        let payload = map.remove("payload").ok_or(FrameError::Shape)?;
        Ok(Self {
            seq,
            ts,
            kind,
            payload,
        })
    }
}

/// An entry waiting to be appended.
#[derive(Debug, Clone)]
pub struct PendingRecord {
    pub ts: Millis,
    pub kind: String,
    pub payload: Value,
}

enum Sink {
    File { file: File, path: PathBuf },
    Memory(Vec<u8>),
}

/// The single appender for a journal.
pub struct Journal {
    sink: Sink,
    len: u64,
    last_seq: u64,
    closed: bool,
}

impl std::fmt::Debug for Journal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let backend = match &self.sink {
            Sink::File { path, .. } => path.display().to_string(),
            Sink::Memory(_) => "<memory>".to_string(),
        };
        f.debug_struct("Journal")
            .field("backend", &backend)
            .field("len", &self.len)
            .field("last_seq", &self.last_seq)
            .field("closed", &self.closed)
            .finish()
    }
}

impl Journal {
    pub fn in_memory() -> Self {
        Self {
            sink: Sink::Memory(Vec::new()),
            len: 0,
            last_seq: 0,
            closed: false,
        }
    }

    /// An in-memory journal seeded with already-verified bytes.
    pub fn in_memory_from(bytes: Vec<u8>, last_seq: u64) -> Self {
        Self {
            len: bytes.len() as u64,
            sink: Sink::Memory(bytes),
            last_seq,
            closed: false,
        }
    }

    /// Opens `<dir>/journal.log` for appending. `valid_len` is the byte
    /// length that recovery verified; anything after it (a torn tail) is cut.
    pub fn open_file(dir: &Path, valid_len: u64, last_seq: u64) -> Result<Self> {
        let path = dir.join(JOURNAL_FILE);
        let mut file = OpenOptions::new()
            .create(true)
            .read(true)
            .write(true)
            .truncate(false)
            .open(&path)?;
        let on_disk = file.metadata()?.len();
        if on_disk != valid_len {
            tracing::warn!(on_disk, valid_len, "truncating journal tail");
            file.set_len(valid_len)?;
            file.sync_data()?;
        }
        file.seek(SeekFrom::Start(valid_len))?;
        Ok(Self {
            sink: Sink::File { file, path },
            len: valid_len,
            last_seq,
            closed: false,
        })
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn path(&self) -> Option<&Path> {
        match &self.sink {
            Sink::File { path, .. } => Some(path),
            Sink::Memory(_) => None,
        }
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn append(&mut self, ts: Millis, kind: &str, payload: Value) -> Result<u64> {
        let seqs = self.append_batch(vec![PendingRecord {
            ts,
            kind: kind.to_string(),
            payload,
        }])?;
        Ok(seqs[0].seq)
    }

    /// Appends all records with a single write and flush. Either every
    /// record is durable when this returns `Ok`, or the journal is restored
    /// to its previous length and an error is returned.
    pub fn append_batch(&mut self, batch: Vec<PendingRecord>) -> Result<Vec<JournalRecord>> {
        if self.closed {
            return Err(BankError::storage("journal is closed"));
        }
        let mut buf = String::new();
        let mut records = Vec::with_capacity(batch.len());
        for (i, pending) in batch.into_iter().enumerate() {
            let record = JournalRecord {
                seq: self.last_seq + 1 + i as u64,
                ts: pending.ts,
                kind: pending.kind,
                payload: pending.payload,
            };
            buf.push_str(&record.encode()?);
            buf.push('\n');
            records.push(record);
        }
        match &mut self.sink {
            Sink::Memory(bytes) => bytes.extend_from_slice(buf.as_bytes()),
            Sink::File { file, .. } => {
                let written = file.write_all(buf.as_bytes()).and_then(|_| file.sync_data());
                if let Err(err) = written {
                    // Best effort: drop whatever part of the batch reached the file.
                    let _ = file.set_len(self.len);
                    let _ = file.seek(SeekFrom::Start(self.len));
                    return Err(BankError::storage(format!("journal append failed: {err}")));
                }
            }
        }
        self.len += buf.len() as u64;
        self.last_seq += records.len() as u64;
        Ok(records)
    }

    /// The journal's current bytes.
    pub fn bytes(&self) -> Result<Vec<u8>> {
        match &self.sink {
            Sink::Memory(bytes) => Ok(bytes.clone()),
            Sink::File { path, .. } => Ok(std::fs::read(path)?),
        }
    }
}

/// Result of scanning journal bytes.
#[derive(Debug)]
pub struct ScannedJournal {
    pub records: Vec<JournalRecord>,
    /// Byte length of the verified prefix.
    pub valid_len: u64,
    pub torn_tail: bool,
}

/// Splits and verifies journal bytes.
///
/// A record is complete only when newline-terminated. The final line may be
/// torn (unterminated or failing its checksum); it is dropped with a warning.
/// Any other failure is `CORRUPT_RECORD` naming the sequence number expected
/// at that position.
pub fn scan(bytes: &[u8]) -> Result<ScannedJournal> {
    let mut records = Vec::new();
    let mut offset = 0usize;
    let mut torn_tail = false;
    while offset < bytes.len() {
        let expected = records.len() as u64 + 1;
        let rest = &bytes[offset..];
        let Some(nl) = rest.iter().position(|b| *b == b'\n') else {
            tracing::warn!(seq = expected, bytes = rest.len(), "dropping unterminated journal tail");
            torn_tail = true;
            break;
        };
        let line = &rest[..nl];
        let is_last = offset + nl + 1 == bytes.len();
        match JournalRecord::decode(line) {
            Ok(record) if record.seq == expected => records.push(record),
            Ok(record) => {
                return Err(BankError::new(
                    ErrorCode::CorruptRecord,
                    format!("CORRUPT_RECORD({expected}): found seq {}", record.seq),
                ))
            }
            Err(err) if is_last => {
                tracing::warn!(seq = expected, ?err, "dropping torn final journal record");
                torn_tail = true;
                break;
            }
            Err(err) => {
                return Err(BankError::new(
                    ErrorCode::CorruptRecord,
                    format!("CORRUPT_RECORD({expected}): {err:?}"),
                ))
            }
        }
        offset += nl + 1;
    }
    Ok(ScannedJournal {
        records,
        valid_len: offset as u64,
        torn_tail,
    })
}

/// Extracts the sequence number from a `CORRUPT_RECORD(n)` error.
pub fn corrupt_seq(err: &BankError) -> Option<u64> {
    if err.code != ErrorCode::CorruptRecord {
        return None;
    }
    let rest = err.message.strip_prefix("CORRUPT_RECORD(")?;
    rest[..rest.find(')')?].parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn ten_records() -> Vec<u8> {
        let mut j = Journal::in_memory();
        for i in 0..10 {
            j.append(1000 + i, "AUDIT", json!({"n": i})).unwrap();
        }
        j.bytes().unwrap()
    }

    #[test]
    fn first_append_is_seq_one_then_two() {
        let mut j = Journal::in_memory();
        assert_eq!(j.append(1, "AUDIT", json!({})).unwrap(), 1);
        assert_eq!(j.append(2, "AUDIT", json!({})).unwrap(), 2);
        let scanned = scan(&j.bytes().unwrap()).unwrap();
        let seqs: Vec<u64> = scanned.records.iter().map(|r| r.seq).collect();
        assert_eq!(seqs, vec![1, 2]);
    }

    #[test]
    fn append_after_close_fails() {
        let mut j = Journal::in_memory();
        j.close();
        let err = j.append(1, "AUDIT", json!({})).unwrap_err();
        assert_eq!(err.code, ErrorCode::StorageFailure);
    }

    #[test]
    fn record_line_layout() {
        let r = JournalRecord {
            seq: 1,
            ts: 1700000000000,
            kind: "AUDIT".into(),
            payload: json!({"operation": "x"}),
        };
        let line = r.encode().unwrap();
        let prefix = r#"{"kind":"AUDIT","payload":{"operation":"x"},"seq":1,"ts":1700000000000"#;
        assert!(line.starts_with(prefix));
        assert_eq!(
            &line[prefix.len()..],
            format!(",\"crc\":\"{:08x}\"}}", crc32fast::hash(prefix.as_bytes()))
        );
    }

    #[test]
    fn empty_journal_scans_clean() {
        let s = scan(b"").unwrap();
        assert!(s.records.is_empty());
        assert_eq!(s.valid_len, 0);
        assert!(!s.torn_tail);
    }

    #[test]
    fn flipped_byte_mid_file_names_the_record() {
        let mut bytes = ten_records();
        let starts: Vec<usize> = std::iter::once(0)
            .chain(bytes.iter().enumerate().filter(|(_, b)| **b == b'\n').map(|(i, _)| i + 1))
            .collect();
        bytes[starts[2] + 5] ^= 0x20;
        let err = scan(&bytes).unwrap_err();
        assert_eq!(corrupt_seq(&err), Some(3));
    }

    #[test]
    fn flipping_the_newline_of_record_three_is_still_record_three() {
        let mut bytes = ten_records();
        let third_nl = bytes
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == b'\n')
            .nth(2)
            .unwrap()
            .0;
        bytes[third_nl] = b'x';
        assert_eq!(corrupt_seq(&scan(&bytes).unwrap_err()), Some(3));
    }

    #[test]
    fn torn_tail_at_every_offset_recovers_previous_records() {
        let bytes = ten_records();
        let last_start = bytes[..bytes.len() - 1]
            .iter()
            .rposition(|b| *b == b'\n')
            .unwrap()
            + 1;
        for cut in last_start..bytes.len() {
            let s = scan(&bytes[..cut]).unwrap();
            assert_eq!(s.records.len(), 9, "cut at {cut}");
            assert_eq!(s.valid_len as usize, last_start);
        }
    }

    #[test]
    fn corrupt_checksum_on_final_line_is_torn() {
        let mut bytes = ten_records();
        let n = bytes.len();
        bytes[n - 5] ^= 0x01;
        let s = scan(&bytes).unwrap();
        assert_eq!(s.records.len(), 9);
        assert!(s.torn_tail);
    }

    #[test]
    fn sequence_gap_is_corruption() {
        let a = JournalRecord { seq: 1, ts: 0, kind: "AUDIT".into(), payload: json!({}) };
        let b = JournalRecord { seq: 3, ts: 0, kind: "AUDIT".into(), payload: json!({}) };
        let bytes = format!("{}\n{}\n", a.encode().unwrap(), b.encode().unwrap());
        assert_eq!(corrupt_seq(&scan(bytes.as_bytes()).unwrap_err()), Some(2));
    }

    #[test]
    fn file_journal_truncates_torn_tail_on_open() {
        let dir = tempfile::tempdir().unwrap();
        let mut bytes = ten_records();
        bytes.extend_from_slice(b"{\"kind\":\"AU");
        std::fs::write(dir.path().join(JOURNAL_FILE), &bytes).unwrap();
        let s = scan(&bytes).unwrap();
        let mut j = Journal::open_file(dir.path(), s.valid_len, 10).unwrap();
        assert_eq!(j.append(2000, "AUDIT", json!({})).unwrap(), 11);
        let again = scan(&std::fs::read(dir.path().join(JOURNAL_FILE)).unwrap()).unwrap();
        assert_eq!(again.records.len(), 11);
        assert!(!again.torn_tail);
    }
}
