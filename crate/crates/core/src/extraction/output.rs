//! Lenient parsing of model replies into candidate records.

use std::sync::LazyLock;

use regex::Regex;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::ingest::ScannerKind;
use crate::schema::{CvssVersion, ParseError, SeverityLabel, UnifiedVulnerability, OTHER_KEY};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MalformedOutput {
    #[error("reply is not a JSON array: {0}")]
    NotADocument(ParseError),
    #[error("reply must be a JSON array, found {0}")]
    NotAnArray(&'static str),
    #[error("element {index} is not an object")]
    NotAnObject { index: usize },
}

static FENCE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?s)```[A-Za-z0-9_-]*[ \t]*\r?\n(.*?)\r?\n?```").unwrap());

fn kind_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// Returns the document body with an optional code fence removed.
pub fn strip_fences(text: &str) -> &str {
    let trimmed = text.trim();
    match FENCE.captures(trimmed) {
        Some(c) => c.get(1).unwrap().as_str().trim(),
        None => trimmed,
    }
}

/// Parses a reply into records for `kind`.
///
/// Missing keys become NULL, scalar types are coerced where the intent is
/// clear, and unknown keys are preserved under `raw_fields["Other"]`. Ids
/// are left empty for the caller to assign when the reply has none.
pub fn parse_model_output(text: &str, kind: ScannerKind) -> Result<Vec<UnifiedVulnerability>, MalformedOutput> {
    let body = strip_fences(text);
    let value: Value = serde_json::from_str(body).map_err(|e| MalformedOutput::NotADocument(ParseError::from_json(body, &e)))?;
    let Value::Array(items) = value else {
        return Err(MalformedOutput::NotAnArray(kind_name(&value)));
    };
    items
        .into_iter()
        .enumerate()
        .map(|(index, item)| match item {
            Value::Object(map) => Ok(record_from_object(map, kind)),
            _ => Err(MalformedOutput::NotAnObject { index }),
        })
        .collect()
}

fn as_text(v: &Value) -> Option<String> {
    let s = match v {
        Value::Null => return None,
        Value::String(s) => s.trim().to_string(),
        Value::Array(items) => items.iter().filter_map(as_text).collect::<Vec<_>>().join("\n"),
        Value::Bool(_) | Value::Number(_) | Value::Object(_) => v.to_string(),
    };
    let lowered = s.to_ascii_lowercase();
    (!s.is_empty() && lowered != "null" && lowered != "n/a").then_some(s)
}

fn as_list(v: &Value, split: impl Fn(&str) -> Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = match v {
        Value::Array(items) => items.iter().filter_map(as_text).collect(),
        other => as_text(other).map(|s| split(&s)).unwrap_or_default(),
    };
    let mut seen = std::collections::HashSet::new();
    out.retain(|s| seen.insert(s.clone()));
    out
}

fn split_tokens(s: &str) -> Vec<String> {
    s.split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn split_lines(s: &str) -> Vec<String> {
    s.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect()
}

fn as_score(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn as_cvss_version(v: &Value) -> Option<CvssVersion> {
    let s = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.to_ascii_lowercase(),
        _ => return None,
    };
    let major = s
        .trim()
        .trim_start_matches("cvss")
        .trim_start_matches(':')
        .trim_start_matches('v')
        .trim()
        .chars()
        .next()?;
    CvssVersion::from_major(major)
}

fn as_severity(v: &Value) -> Option<SeverityLabel> {
    let s = as_text(v)?;
    Some(SeverityLabel::parse_loose(&s).unwrap_or(SeverityLabel::Unrecognized(s)))
}

fn record_from_object(map: Map<String, Value>, kind: ScannerKind) -> UnifiedVulnerability {
    let mut rec = UnifiedVulnerability::empty("", kind);
    let mut other: Vec<String> = Vec::new();
    let keep_other = |other: &mut Vec<String>, key: &str, v: &Value| {
        if let Some(t) = as_text(v) {
            other.push(format!("{key}: {t}"));
        }
    };
    for (key, v) in map {
        match key.as_str() {
            "id" => rec.id = as_text(&v).unwrap_or_default(),
            "scanner" => {}
            "name" => rec.name = as_text(&v),
            "cves" => rec.cves = as_list(&v, split_tokens),
            "description" => rec.description = as_text(&v),
            "installed_version" => rec.installed_version = as_text(&v),
            "fixed_version" => rec.fixed_version = as_text(&v),
            "impact" => rec.impact = as_text(&v),
            "severity_label" => rec.severity_label = as_severity(&v),
            "cvss_score" => {
                rec.cvss_score = as_score(&v);
                if rec.cvss_score.is_none() {
                    keep_other(&mut other, &key, &v);
                }
            }
            "cvss_version" => {
                rec.cvss_version = as_cvss_version(&v);
                if rec.cvss_version.is_none() {
                    keep_other(&mut other, &key, &v);
                }
            }
            "solution" => rec.solution = as_text(&v),
            "detection_method" => rec.detection_method = as_text(&v),
            "family" => rec.family = as_text(&v),
            "references" => rec.references = as_list(&v, split_lines),
            "host" => rec.host = as_text(&v),
            "port" => rec.port = as_text(&v),
            "raw_fields" => match v {
                Value::Object(raw) => {
                    for (label, text) in raw {
                        if let Some(t) = as_text(&text) {
                            if label == OTHER_KEY {
                                other.push(t);
                            } else {
                                rec.raw_fields.insert(label, t);
                            }
                        }
                    }
                }
                other_value => keep_other(&mut other, &key, &other_value),
            },
            _ => keep_other(&mut other, &key, &v),
        }
    }
    if !other.is_empty() {
        rec.raw_fields.insert(OTHER_KEY.to_string(), other.join("\n"));
    }
    rec
}
