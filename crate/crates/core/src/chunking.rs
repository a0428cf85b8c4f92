//! Record segmentation and character-budgeted chunk packing.
//!
//! Offsets are character offsets into [`NormalizedText::text`]. Records are
//! packed greedily in document order; a record longer than
//! `hard_max_chars` is split at line boundaries that stay clear of protected
//! markers such as `CVSS:`, and each continuation repeats up to
//! `overlap_chars` of trailing context.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialect;
use crate::ingest::{NormalizedText, ScannerKind};
use crate::schema::to_canonical_string;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChunkError {
    #[error("no {0} record headers found (wrong scanner dialect or corrupt text?)")]
    NoRecordsFound(ScannerKind),
    #[error("cannot segment records without a scanner dialect")]
    UnknownScanner,
    #[error("invalid chunk config: {0}")]
    Config(String),
    #[error("record spans must be non-empty, ordered and non-overlapping")]
    BadSpans,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSpan {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub header_line: String,
}

impl RecordSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Record spans plus the text before the first header, kept for audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub preamble: Option<(usize, usize)>,
    pub records: Vec<RecordSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkConfig {
    pub target_chars: usize,
    pub hard_max_chars: usize,
    pub overlap_chars: usize,
    pub protected_markers: Vec<String>,
}

impl Default for ChunkConfig {
    fn default() -> Self {
        ChunkConfig {
            target_chars: 9000,
            hard_max_chars: 12000,
            overlap_chars: 500,
            protected_markers: vec!["NVT:".into(), "CVSS:".into()],
        }
    }
}

impl ChunkConfig {
    pub fn validate(&self) -> Result<(), ChunkError> {
        if self.target_chars == 0 || self.hard_max_chars == 0 {
            return Err(ChunkError::Config("budgets must be positive".into()));
        }
        if self.target_chars > self.hard_max_chars {
            return Err(ChunkError::Config(format!(
                "target_chars {} exceeds hard_max_chars {}",
                self.target_chars, self.hard_max_chars
            )));
        }
        if self.overlap_chars >= self.target_chars {
            return Err(ChunkError::Config(format!(
                "overlap_chars {} must be below target_chars {}",
                self.overlap_chars, self.target_chars
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Continuation {
    pub record: usize,
    /// 1 for the first continuation after the opening part.
    pub part: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub id: usize,
    pub record_indices: Vec<usize>,
    pub text: String,
    pub char_length: usize,
    pub continuation_of: Option<Continuation>,
    /// Leading characters of `text` repeated from the previous part.
    pub overlap_chars: usize,
    /// Char offset of `text` in the normalized report.
    pub start: usize,
    pub end: usize,
}

impl Chunk {
    /// Text without the repeated overlap prefix.
    pub fn fresh_text(&self) -> &str {
        let skip = self
            .text
            .char_indices()
            .nth(self.overlap_chars)
            .map_or(self.text.len(), |(b, _)| b);
        &self.text[skip..]
    }
}

/// Maps char offsets to byte offsets.
struct CharIndex<'a> {
    text: &'a str,
    bytes: Vec<usize>,
}

impl<'a> CharIndex<'a> {
    fn new(text: &'a str) -> Self {
        let mut bytes: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        bytes.push(text.len());
        CharIndex { text, bytes }
    }

    fn len(&self) -> usize {
        self.bytes.len() - 1
    }

    fn slice(&self, start: usize, end: usize) -> &'a str {
        &self.text[self.bytes[start]..self.bytes[end]]
    }

    fn char_at_byte(&self, byte: usize) -> usize {
        self.bytes.partition_point(|b| *b < byte)
    }
}

pub fn segment_records(norm: &NormalizedText, kind: ScannerKind) -> Result<Segmentation, ChunkError> {
    if kind == ScannerKind::Unknown {
        return Err(ChunkError::UnknownScanner);
    }
    let mut headers: Vec<(usize, String)> = Vec::new();
    let mut offset = 0usize;
    for line in norm.text.split_inclusive('\n') {
        let content = line.strip_suffix('\n').unwrap_or(line);
        if dialect::is_record_header(kind, content) {
            headers.push((offset, content.to_string()));
        }
        offset += line.chars().count();
    }
    let total = offset;
    if headers.is_empty() {
        return Err(ChunkError::NoRecordsFound(kind));
    }
    let preamble = (headers[0].0 > 0).then_some((0, headers[0].0));
    let records = headers
        .iter()
        .enumerate()
        .map(|(i, (start, header))| RecordSpan {
            index: i,
            start: *start,
            end: headers.get(i + 1).map_or(total, |h| h.0),
            header_line: header.clone(),
        })
        .collect();
    Ok(Segmentation { preamble, records })
}

struct Windows {
    /// (marker position, end of the enclosing record)
    markers: Vec<(usize, usize)>,
    overlap: usize,
}

impl Windows {
    fn new(idx: &CharIndex<'_>, spans: &[RecordSpan], cfg: &ChunkConfig) -> Self {
        let mut markers = Vec::new();
        for marker in cfg.protected_markers.iter().filter(|m| !m.is_empty()) {
            for (byte, _) in idx.text.match_indices(marker.as_str()) {
                let pos = idx.char_at_byte(byte);
                let record_end = spans
                    .iter()
                    .find(|s| s.start <= pos && pos < s.end)
                    .map_or(idx.len(), |s| s.end);
                markers.push((pos, record_end));
            }
        }
        markers.sort_unstable();
        Windows {
            markers,
            overlap: cfg.overlap_chars,
        }
    }

    /// Strictly inside `(m, m + overlap)`, clipped to the marker's record.
    fn inside(&self, b: usize) -> bool {
        self.markers
            .iter()
            .any(|&(m, rec_end)| m < b && b < (m + self.overlap).min(rec_end))
    }

    /// Also rejects cuts in the `overlap` characters leading up to a marker,
    /// so the repeated context never starts inside the window either.
    fn near(&self, b: usize) -> bool {
        self.inside(b)
            || self
                .markers
                .iter()
                .any(|&(m, _)| b + self.overlap >= m && b <= m && b > 0 && self.overlap > 0)
    }
}

pub fn build_chunks(spans: &[RecordSpan], norm: &NormalizedText, cfg: &ChunkConfig) -> Result<Vec<Chunk>, ChunkError> {
    cfg.validate()?;
    let idx = CharIndex::new(&norm.text);
    if spans.is_empty()
        || spans
            .windows(2)
            .any(|w| w[0].end > w[1].start || w[0].start >= w[0].end)
        || spans.iter().any(|s| s.start >= s.end || s.end > idx.len())
    {
        return Err(ChunkError::BadSpans);
    }
    let windows = Windows::new(&idx, spans, cfg);
    let line_starts: Vec<usize> = {
        let mut v = Vec::new();
        let mut pos = 0;
        for c in norm.text.chars() {
            pos += 1;
            if c == '\n' {
                v.push(pos);
            }
        }
        v
    };

    let mut chunks: Vec<Chunk> = Vec::new();
    let mut group: Vec<&RecordSpan> = Vec::new();
    let mut group_len = 0usize;

    let flush = |group: &mut Vec<&RecordSpan>, group_len: &mut usize, chunks: &mut Vec<Chunk>| {
        if group.is_empty() {
            return;
        }
        let text: String = group.iter().map(|s| idx.slice(s.start, s.end)).collect();
        chunks.push(Chunk {
            id: chunks.len(),
            record_indices: group.iter().map(|s| s.index).collect(),
            char_length: *group_len,
            text,
            continuation_of: None,
            overlap_chars: 0,
            start: group[0].start,
            end: group[group.len() - 1].end,
        });
        group.clear();
        *group_len = 0;
    };

    for span in spans {
        let len = span.len();
        if len > cfg.hard_max_chars {
            flush(&mut group, &mut group_len, &mut chunks);
            for (part, (start, end, overlap)) in split_record(span, cfg, &windows, &line_starts)
                .into_iter()
                .enumerate()
            {
                let text_start = start - overlap;
                chunks.push(Chunk {
                    id: chunks.len(),
                    record_indices: vec![span.index],
                    text: idx.slice(text_start, end).to_string(),
                    char_length: end - text_start,
                    continuation_of: (part > 0).then_some(Continuation {
                        record: span.index,
                        part,
                    }),
                    overlap_chars: overlap,
                    start: text_start,
                    end,
                });
            }
            continue;
        }
        if !group.is_empty() && group_len + len > cfg.target_chars {
            flush(&mut group, &mut group_len, &mut chunks);
        }
        group.push(span);
        group_len += len;
    }
    flush(&mut group, &mut group_len, &mut chunks);
    Ok(chunks)
}

/// Returns `(fresh_start, end, overlap)` per part of an oversize record.
fn split_record(
    span: &RecordSpan,
    cfg: &ChunkConfig,
    windows: &Windows,
    line_starts: &[usize],
) -> Vec<(usize, usize, usize)> {
    let mut parts = Vec::new();
    let mut cur = span.start;
    let mut overlap = 0usize;
    loop {
        let avail = cfg.hard_max_chars - overlap;
        if span.end - cur <= avail {
            parts.push((cur, span.end, overlap));
            return parts;
        }
        let budget_end = cur + avail;
        let lo = line_starts.partition_point(|b| *b <= cur);
        let hi = line_starts.partition_point(|b| *b < span.end);
        let candidates = &line_starts[lo..hi];
        let within = candidates.partition_point(|b| *b <= budget_end);
        let (fits, beyond) = candidates.split_at(within);
        let cut = fits
            .iter()
            .rev()
            .find(|b| !windows.near(**b))
            .or_else(|| fits.iter().rev().find(|b| !windows.inside(**b)))
            .or_else(|| beyond.iter().find(|b| !windows.inside(**b)))
            .copied()
            .unwrap_or(span.end);
        parts.push((cur, cut, overlap));
        if cut == span.end {
            return parts;
        }
        overlap = cfg.overlap_chars.min(cut - span.start);
        cur = cut;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkReport {
    pub coverage_complete: bool,
    pub chunk_count: usize,
    pub max_chunk_chars: usize,
    pub mean_chunk_chars: f64,
    pub records_split: usize,
    pub missing_records: Vec<usize>,
    pub duplicated_records: Vec<usize>,
    pub broken_chains: Vec<usize>,
}

pub fn validate_chunks(chunks: &[Chunk], spans: &[RecordSpan]) -> ChunkReport {
    use std::collections::BTreeMap;

    let known: std::collections::BTreeSet<usize> = spans.iter().map(|s| s.index).collect();
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let mut chains: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut broken = Vec::new();
    let mut unknown = false;

    for c in chunks {
        if c.text.is_empty() {
            unknown = true;
        }
        match c.continuation_of {
            None => {
                for i in &c.record_indices {
                    *seen.entry(*i).or_default() += 1;
                    unknown |= !known.contains(i);
                }
            }
            Some(cont) => {
                chains.entry(cont.record).or_default().push(cont.part);
                if c.record_indices != [cont.record] {
                    broken.push(cont.record);
                }
            }
        }
    }
    for (record, parts) in &chains {
        let opener_alone = chunks
            .iter()
            .any(|c| c.continuation_of.is_none() && c.record_indices == [*record]);
        let contiguous = parts.iter().enumerate().all(|(i, p)| *p == i + 1);
        if !opener_alone || !contiguous {
            broken.push(*record);
        }
    }
    broken.sort_unstable();
    broken.dedup();

    let missing: Vec<usize> = known.iter().filter(|i| !seen.contains_key(i)).copied().collect();
    let duplicated: Vec<usize> = seen.iter().filter(|(_, n)| **n > 1).map(|(i, _)| *i).collect();
    let lengths: Vec<usize> = chunks.iter().map(|c| c.char_length).collect();

    ChunkReport {
        coverage_complete: !unknown && missing.is_empty() && duplicated.is_empty() && broken.is_empty(),
        chunk_count: chunks.len(),
        max_chunk_chars: lengths.iter().copied().max().unwrap_or(0),
        mean_chunk_chars: if lengths.is_empty() {
            0.0
        } else {
            lengths.iter().sum::<usize>() as f64 / lengths.len() as f64
        },
        records_split: chains.len(),
        missing_records: missing,
        duplicated_records: duplicated,
        broken_chains: broken,
    }
}

#[derive(Debug, Serialize)]
struct ManifestEntry<'a> {
    id: usize,
    record_indices: &'a [usize],
    char_length: usize,
    continuation_of: Option<Continuation>,
    overlap_chars: usize,
    file: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    chunks: Vec<ManifestEntry<'a>>,
    report: &'a ChunkReport,
    config: &'a ChunkConfig,
}

/// Writes `chunk_<id>.txt` per chunk and `manifest.json` into `dir`.
pub fn write_debug_dump(dir: &Path, chunks: &[Chunk], report: &ChunkReport, cfg: &ChunkConfig) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(chunks.len());
    for c in chunks {
        let file = format!("chunk_{}.txt", c.id);
        fs::write(dir.join(&file), &c.text)?;
        entries.push(ManifestEntry {
            id: c.id,
            record_indices: &c.record_indices,
            char_length: c.char_length,
            continuation_of: c.continuation_of,
            overlap_chars: c.overlap_chars,
            file,
        });
    }
    let manifest = Manifest {
        chunks: entries,
        report,
        config: cfg,
    };
    fs::write(dir.join("manifest.json"), to_canonical_string(&manifest))
}
