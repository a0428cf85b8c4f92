//! Report ingestion: reading, text normalization and scanner detection.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no extractable text layer in {path}: {reason}")]
    UnreadablePdf { path: PathBuf, reason: String },
    #[error("{path} is not UTF-8 text ({invalid} of {total} bytes invalid)")]
    EncodingError {
        path: PathBuf,
        invalid: usize,
        total: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Pdf,
    Text,
}

/// Which scanner produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScannerKind {
    #[serde(rename = "openvas")]
    OpenVas,
    TenableWas,
    Unknown,
}

impl ScannerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScannerKind::OpenVas => "openvas",
            ScannerKind::TenableWas => "tenable_was",
            ScannerKind::Unknown => "unknown",
        }
    }

    /// Human-readable product name, used in prompts.
    pub fn display_name(self) -> &'static str {
        match self {
            ScannerKind::OpenVas => "OpenVAS",
            ScannerKind::TenableWas => "Tenable WAS",
            ScannerKind::Unknown => "unknown scanner",
        }
    }
}

impl fmt::Display for ScannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "openvas" => Ok(ScannerKind::OpenVas),
            "tenable" | "tenable_was" | "tenable-was" => Ok(ScannerKind::TenableWas),
            "unknown" => Ok(ScannerKind::Unknown),
            other => Err(format!("unknown scanner kind `{other}`")),
        }
    }
}

/// A report as read from disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawReport {
    pub source_path: PathBuf,
    pub format: ReportFormat,
    pub content: String,
    pub byte_length: usize,
    /// Invalid UTF-8 sequences and NUL bytes replaced or dropped while decoding.
    pub replaced_sequences: usize,
}

impl RawReport {
    /// Builds a text report from an in-memory string, dropping NUL bytes.
    pub fn from_text(source_path: impl Into<PathBuf>, content: &str) -> Self {
        let nuls = content.matches('\0').count();
        let content = if nuls > 0 {
            content.replace('\0', "")
        } else {
            content.to_string()
        };
        RawReport {
            source_path: source_path.into(),
            format: ReportFormat::Text,
            byte_length: content.len(),
            content,
            replaced_sequences: nuls,
        }
    }
}

pub fn read_report(path: &Path, format_hint: Option<ReportFormat>) -> Result<RawReport, IngestError> {
    if !path.exists() {
        return Err(IngestError::FileNotFound(path.to_path_buf()));
    }
    let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = format_hint.unwrap_or_else(|| infer_format(path, &bytes));
    match format {
        ReportFormat::Text => decode_text(path, &bytes),
        ReportFormat::Pdf => {
            let text = extract_pdf_text(path, &bytes)?;
            let mut raw = RawReport::from_text(path, &text);
            raw.format = ReportFormat::Pdf;
            Ok(raw)
        }
    }
}

fn infer_format(path: &Path, bytes: &[u8]) -> ReportFormat {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("pdf") => ReportFormat::Pdf,
        Some("txt" | "text" | "log") => ReportFormat::Text,
        _ if bytes.starts_with(b"%PDF-") => ReportFormat::Pdf,
        _ => ReportFormat::Text,
    }
}

fn decode_text(path: &Path, bytes: &[u8]) -> Result<RawReport, IngestError> {
    let mut content = String::with_capacity(bytes.len());
    let mut invalid_bytes = 0usize;
    let mut replaced = 0usize;
    for chunk in bytes.utf8_chunks() {
        content.push_str(chunk.valid());
        if !chunk.invalid().is_empty() {
            invalid_bytes += chunk.invalid().len();
            replaced += 1;
            content.push(char::REPLACEMENT_CHARACTER);
        }
    }
    if !bytes.is_empty() && invalid_bytes * 2 > bytes.len() {
        return Err(IngestError::EncodingError {
            path: path.to_path_buf(),
            invalid: invalid_bytes,
            total: bytes.len(),
        });
    }
    if replaced > 0 {
        log::warn!(
            "{}: replaced {replaced} invalid UTF-8 sequence(s)",
            path.display()
        );
    }
    let mut raw = RawReport::from_text(path, &content);
    raw.replaced_sequences += replaced;
    Ok(raw)
}

fn extract_pdf_text(path: &Path, bytes: &[u8]) -> Result<String, IngestError> {
    // pdf-extract panics on some malformed documents.
    let extracted = std::panic::catch_unwind(|| pdf_extract::extract_text_from_mem(bytes));
    let unreadable = |reason: String| IngestError::UnreadablePdf {
        path: path.to_path_buf(),
        reason,
    };
    match extracted {
        Ok(Ok(text)) if text.chars().any(|c| !c.is_whitespace()) => Ok(text),
        Ok(Ok(_)) => Err(unreadable("text layer is empty (scanned or image-only PDF?)".into())),
        Ok(Err(e)) => Err(unreadable(e.to_string())),
        Err(_) => Err(unreadable("PDF parser failed".into())),
    }
}

/// Report text after line-ending normalization and page-artifact removal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedText {
    pub text: String,
    pub line_count: usize,
    pub removed_artifacts: usize,
}

impl NormalizedText {
    /// Wraps text that is already normalized (tests, FFI callers).
    pub fn from_normalized(text: impl Into<String>) -> Self {
        let text = text.into();
        NormalizedText {
            line_count: text.lines().count(),
            text,
            removed_artifacts: 0,
        }
    }
}

static PAGE_NUMBER_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^\s*(?:(?:page\s+)?\d{1,5}(?:\s*(?:/|of)\s*\d{1,5})?|-\s*\d{1,5}\s*-)\s*$").unwrap()
});
static PAGE_TOKEN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bpage\s*#|#\s*(?:of|/)\s*#").unwrap());
static DIGIT_RUN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+").unwrap());

/// Lines whose digit-masked form carries a page token and repeats this often
/// are treated as running headers or footers.
const RUNNING_HEADER_MIN_REPEATS: usize = 3;

pub fn normalize_text(raw: &RawReport) -> NormalizedText {
    let unified = raw
        .content
        .replace("\r\n", "\n")
        .replace(['\r', '\u{c}'], "\n");
    let had_trailing_newline = unified.ends_with('\n');

    let lines: Vec<&str> = unified.lines().map(str::trim_end).collect();

    let mut masked_counts: HashMap<String, usize> = HashMap::new();
    for line in &lines {
        if let Some(masked) = running_header_key(line) {
            *masked_counts.entry(masked).or_default() += 1;
        }
    }

    let mut removed = 0usize;
    let mut kept: Vec<&str> = Vec::with_capacity(lines.len());
    for line in lines {
        let is_artifact = PAGE_NUMBER_LINE.is_match(line)
            || running_header_key(line)
                .is_some_and(|k| masked_counts[&k] >= RUNNING_HEADER_MIN_REPEATS);
        if is_artifact {
            removed += 1;
            continue;
        }
        if line.is_empty() && kept.last().is_some_and(|prev| prev.is_empty()) {
            continue;
        }
        kept.push(line);
    }

    let mut text = kept.join("\n");
    if had_trailing_newline && !text.is_empty() {
        text.push('\n');
    }
    NormalizedText {
        line_count: text.lines().count(),
        text,
        removed_artifacts: removed,
    }
}

fn running_header_key(line: &str) -> Option<String> {
    if !line.bytes().any(|b| b.is_ascii_digit()) {
        return None;
    }
    let masked = DIGIT_RUN.replace_all(line.trim(), "#").into_owned();
    PAGE_TOKEN.is_match(&masked).then_some(masked)
}

/// Weighted marker strings used by [`detect_scanner_with`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerSet {
    pub openvas: Vec<(String, f64)>,
    pub tenable_was: Vec<(String, f64)>,
}

impl Default for MarkerSet {
    fn default() -> Self {
        let own = |v: &[(&str, f64)]| v.iter().map(|(m, w)| (m.to_string(), *w)).collect();
        MarkerSet {
            openvas: own(&[
                ("NVT:", 3.0),
                ("1.3.6.1.4.1.25623", 3.0),
                ("OpenVAS", 2.0),
                ("Greenbone", 2.0),
                ("Vulnerability Detection Result", 1.0),
                ("Vulnerability Insight", 1.0),
                ("Log Method", 1.0),
            ]),
            tenable_was: own(&[
                ("Plugin ID", 3.0),
                ("VPR", 2.0),
                ("Tenable", 2.0),
                ("Plugin Details", 1.0),
                ("Risk Information", 1.0),
                ("Reference Information", 1.0),
            ]),
        }
    }
}

pub fn detect_scanner(norm: &NormalizedText) -> ScannerKind {
    detect_scanner_with(norm, &MarkerSet::default())
}

pub fn detect_scanner_with(norm: &NormalizedText, markers: &MarkerSet) -> ScannerKind {
    let score = |set: &[(String, f64)]| -> f64 {
        set.iter()
            .filter(|(m, _)| !m.is_empty())
            .map(|(m, w)| norm.text.matches(m.as_str()).count() as f64 * w)
            .sum()
    };
    let openvas = score(&markers.openvas);
    let tenable = score(&markers.tenable_was);
    if openvas > tenable {
        ScannerKind::OpenVas
    } else if tenable > openvas {
        ScannerKind::TenableWas
    } else {
        ScannerKind::Unknown
    }
}
