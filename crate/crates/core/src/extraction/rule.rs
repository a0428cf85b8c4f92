//! Deterministic pattern-based extractor.
//!
//! Stands in for a language model: it reads labelled sections directly and
//! runs them through [`map_fields`], so the rest of the pipeline can be
//! exercised offline with bit-exact results.

use crate::chunking::Chunk;
use crate::dialect;
use crate::ingest::ScannerKind;
use crate::schema::{map_fields, FieldMapping, SourceFields, UnifiedVulnerability, NAME_KEY, OTHER_KEY};

/// If `line` opens a mapped section, returns the label and the byte offset of
/// inline text following `Label:` on the same line.
fn section_label<'m>(line: &str, mapping: &'m FieldMapping) -> Option<(&'m str, Option<usize>)> {
    let t = line.trim();
    for e in &mapping.entries {
        let label = e.source_label.as_str();
        if t.len() < label.len() || !t.is_char_boundary(label.len()) || !t[..label.len()].eq_ignore_ascii_case(label) {
            continue;
        }
        let rest = &t[label.len()..];
        if rest.is_empty() || rest == ":" {
            return Some((label, None));
        }
        if let Some(inline) = rest.strip_prefix(':') {
            if inline.starts_with(char::is_whitespace) {
                let offset = line.len() - inline.trim_start().len();
                return Some((label, Some(offset)));
            }
        }
    }
    None
}

fn push_section(fields: &mut SourceFields, label: &str, lines: &[&str]) {
    let text = lines.join("\n");
    let text = text.trim_matches('\n').trim_end();
    if text.trim().is_empty() {
        return;
    }
    fields
        .entry(label.to_string())
        .and_modify(|existing| {
            existing.push('\n');
            existing.push_str(text);
        })
        .or_insert_with(|| text.to_string());
}

/// Splits one record's text into labelled source fields.
///
/// With `header` set, the first line is the record header and the lines up
/// to the first section label are header key/value lines.
pub fn record_source_fields(kind: ScannerKind, text: &str, mapping: &FieldMapping, header: bool) -> SourceFields {
    let mut fields = SourceFields::new();
    let mut other: Vec<String> = Vec::new();
    let mut lines = text.lines().peekable();

    if header {
        if let Some(first) = lines.next() {
            if let Some(name) = dialect::record_header(kind, first) {
                fields.insert(NAME_KEY.to_string(), name.to_string());
            }
        }
        while let Some(line) = lines.peek() {
            if section_label(line, mapping).is_some() {
                break;
            }
            let line = lines.next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once(':').and_then(|(k, v)| dialect::header_key(k).map(|key| (key, v.trim()))) {
                Some((key, value)) if !fields.contains_key(key) => {
                    fields.insert(key.to_string(), value.to_string());
                }
                _ => other.push(line.to_string()),
            }
        }
    }

    let mut current: Option<&str> = None;
    let mut buf: Vec<&str> = Vec::new();
    for line in lines {
        if let Some((label, inline)) = section_label(line, mapping) {
            if let Some(prev) = current {
                push_section(&mut fields, prev, &buf);
            }
            buf.clear();
            current = Some(label);
            if let Some(offset) = inline {
                buf.push(&line[offset..]);
            }
        } else if current.is_some() {
            buf.push(line);
        }
    }
    if let Some(prev) = current {
        push_section(&mut fields, prev, &buf);
    }
    if !other.is_empty() {
        fields.insert(OTHER_KEY.to_string(), other.join("\n"));
    }
    fields
}

pub fn rule_extract(chunk: &Chunk, kind: ScannerKind, mapping: &FieldMapping) -> Vec<UnifiedVulnerability> {
    if kind == ScannerKind::Unknown {
        return Vec::new();
    }
    if let Some(cont) = chunk.continuation_of {
        let fields = record_source_fields(kind, &chunk.text, mapping, false);
        let mut rec = map_fields(kind, &fields, mapping);
        rec.id = format!("{kind}-{}", cont.record);
        return vec![rec];
    }

    let mut records: Vec<String> = Vec::new();
    for line in chunk.text.split_inclusive('\n') {
        let content = line.strip_suffix('\n').unwrap_or(line);
        if dialect::is_record_header(kind, content) {
            records.push(String::new());
        }
        if let Some(cur) = records.last_mut() {
            cur.push_str(line);
        }
    }
    records
        .iter()
        .enumerate()
        .map(|(i, text)| {
            let fields = record_source_fields(kind, text, mapping, true);
            let mut rec = map_fields(kind, &fields, mapping);
            let ordinal = chunk.record_indices.get(i).copied().unwrap_or(i);
            rec.id = format!("{kind}-{ordinal}");
            rec
        })
        .collect()
}
