//! Canonical record documents: pretty JSON with sorted keys, explicit
//! nulls, newline-terminated.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use super::record::{Field, UnifiedVulnerability};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at line {line}, column {column} (char {position}): {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    /// 0-based character offset into the document.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn from_json(text: &str, err: &serde_json::Error) -> Self {
        let line = err.line();
        let column = err.column();
        ParseError {
            line,
            column,
            position: char_position(text, line, column),
            message: err.to_string(),
        }
    }
}

/// serde_json reports 1-based lines and byte columns.
fn char_position(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut pos = 0;
    for (i, l) in text.split('\n').enumerate() {
        if i + 1 == line {
            let col_bytes = column.saturating_sub(1).min(l.len());
            let boundary = (0..=col_bytes).rev().find(|b| l.is_char_boundary(*b)).unwrap_or(0);
            return pos + l[..boundary].chars().count();
        }
        pos += l.chars().count() + 1;
    }
    pos
}

/// Rebuilds every object with lexicographically sorted keys.
pub fn canonicalize(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, canonicalize(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

/// Serializes any value as a canonical document.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> String {
    let v = canonicalize(serde_json::to_value(value).expect("document types serialize to JSON"));
    let mut out = Vec::new();
    let fmt = serde_json::ser::PrettyFormatter::with_indent(b"  ");
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    v.serialize(&mut ser).expect("in-memory serialization");
    out.write_all(b"\n").unwrap();
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn serialize_record(rec: &UnifiedVulnerability) -> String {
    to_canonical_string(rec)
}

pub fn parse_record(text: &str) -> Result<UnifiedVulnerability, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::from_json(text, &e))
}

pub fn serialize_records(records: &[UnifiedVulnerability]) -> String {
    to_canonical_string(records)
}

pub fn parse_records(text: &str) -> Result<Vec<UnifiedVulnerability>, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::from_json(text, &e))
}

/// Column order of the flat CSV export.
pub const CSV_COLUMNS: [&str; 18] = [
    "id",
    "scanner",
    "name",
    "cves",
    "description",
    "installed_version",
    "fixed_version",
    "impact",
    "severity_label",
    "cvss_score",
    "cvss_version",
    "solution",
    "detection_method",
    "family",
    "references",
    "host",
    "port",
    "raw_fields",
];

/// Flattens records to CSV; lists join with `|`, `raw_fields` is embedded JSON.
pub fn write_records_csv<W: Write>(records: &[UnifiedVulnerability], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        let text = |f: Field| r.field_text(f).unwrap_or_default();
        let raw = if r.raw_fields.is_empty() {
            String::new()
        } else {
            serde_json::to_string(&r.raw_fields).unwrap()
        };
        w.write_record([
            r.id.clone(),
            r.scanner.as_str().to_string(),
            text(Field::Name),
            r.cves.join("|"),
            text(Field::Description),
            text(Field::InstalledVersion),
            text(Field::FixedVersion),
            text(Field::Impact),
            text(Field::SeverityLabel),
            text(Field::CvssScore),
            text(Field::CvssVersion),
            text(Field::Solution),
            text(Field::DetectionMethod),
            text(Field::Family),
            r.references.join("|"),
            text(Field::Host),
            text(Field::Port),
            raw,
        ])?;
    }
    w.flush()?;
    Ok(())
}
