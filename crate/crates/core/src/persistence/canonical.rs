//! Canonical text form for journal records and snapshots.
//!
//! A canonical document is compact JSON with object keys in lexicographic
//! byte order and integers in base 10. A framed line appends a CRC-32 (IEEE)
//! field last: the checksum covers every byte of the line up to, but not
//! including, the `,"<field>":"xxxxxxxx"}` suffix.

use serde_json::Value;

use crate::error::{BankError, Result};

/// Length of `,"crc":"` + 8 hex digits + `"}` for a given field name.
fn suffix_len(field: &str) -> usize {
    // , " field " : " 8hex " }
    1 + 1 + field.len() + 1 + 1 + 1 + 8 + 1 + 1
}

pub fn to_canonical(value: &Value) -> Result<String> {
    let mut out = String::new();
    write_value(value, &mut out)?;
    Ok(out)
}

fn write_value(value: &Value, out: &mut String) -> Result<()> {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                return Err(BankError::internal(format!(
                    "non-integer number {n} in canonical document"
                )));
            }
            out.push_str(&n.to_string());
        }
        Value::String(s) => write_string(s, out),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out)?;
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort_unstable();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_string(key, out);
                out.push(':');
                write_value(&map[key], out)?;
            }
            out.push('}');
        }
    }
    Ok(())
}

fn write_string(s: &str, out: &mut String) {
    // serde_json's string escaping is already minimal and deterministic.
    out.push_str(&serde_json::to_string(s).expect("string serialization is infallible"));
}

/// Serializes `value` (which must be a non-empty object) canonically and
/// appends the checksum field `field`.
pub fn frame(value: &Value, field: &str) -> Result<String> {
    let body = to_canonical(value)?;
    if !value.as_object().is_some_and(|m| !m.is_empty()) {
        return Err(BankError::internal("framed documents must be non-empty objects"));
    }
    let prefix = &body[..body.len() - 1];
    let crc = crc32fast::hash(prefix.as_bytes());
    Ok(format!("{prefix},\"{field}\":\"{crc:08x}\"}}"))
}

/// Why a framed line failed to decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FrameError {
    Shape,
    Checksum,
    Json,
    NotCanonical,
}

/// Verifies the checksum of a framed line (no trailing newline) and parses
/// the document without the checksum field.
pub fn unframe(line: &[u8], field: &str) -> std::result::Result<Value, FrameError> {
    let n = suffix_len(field);
    if line.len() <= n + 1 {
        return Err(FrameError::Shape);
    }
    let (prefix, suffix) = line.split_at(line.len() - n);
    let head = format!(",\"{field}\":\"");
    if !suffix.starts_with(head.as_bytes()) || !suffix.ends_with(b"\"}") {
        return Err(FrameError::Shape);
    }
    let hex = &suffix[head.len()..head.len() + 8];
    if !hex.iter().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
        return Err(FrameError::Shape);
    }
    let stored = u32::from_str_radix(std::str::from_utf8(hex).map_err(|_| FrameError::Shape)?, 16)
        .map_err(|_| FrameError::Shape)?;
    if crc32fast::hash(prefix) != stored {
        return Err(FrameError::Checksum);
    }
    let mut body = Vec::with_capacity(prefix.len() + 1);
    body.extend_from_slice(prefix);
    body.push(b'}');
    let value: Value = serde_json::from_slice(&body).map_err(|_| FrameError::Json)?;
    match to_canonical(&value) {
        Ok(c) if c.as_bytes() == body.as_slice() => Ok(value),
        _ => Err(FrameError::NotCanonical),
    }
}
