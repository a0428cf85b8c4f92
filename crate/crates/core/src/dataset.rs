//! The dataset file: run metadata, records, gaps and quarantined records.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chunking::Continuation;
use crate::consolidation::InvalidRecord;
use crate::extraction::FailureCause;
use crate::schema::{to_canonical_string, ParseError, UnifiedVulnerability};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunCounts {
    pub chunks: usize,
    pub chunks_failed: usize,
    pub records_split: usize,
    pub candidates: usize,
    pub stitched_continuations: usize,
    pub dropped_duplicates: usize,
    pub records: usize,
    pub invalid_records: usize,
}

/// Everything needed to re-run an extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunMetadata {
    pub tool_version: String,
    /// Seconds since the Unix epoch; the only field that differs between
    /// otherwise identical runs.
    pub created_unix: u64,
    pub input_sha256: String,
    pub scanner: crate::ScannerKind,
    pub provider: String,
    pub model: String,
    pub temperature: f64,
    pub template_version: String,
    pub config_digest: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub counts: RunCounts,
}

/// A chunk that produced no records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gap {
    pub chunk_id: usize,
    pub record_indices: Vec<usize>,
    #[serde(default)]
    pub continuation_of: Option<Continuation>,
    pub attempts: u32,
    pub cause: FailureCause,
    #[serde(default)]
    pub last_response: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    #[serde(default)]
    pub metadata: Option<RunMetadata>,
    pub records: Vec<UnifiedVulnerability>,
    #[serde(default)]
    pub gaps: Vec<Gap>,
    #[serde(default)]
    pub invalid_records: Vec<InvalidRecord>,
}

impl Dataset {
    pub fn from_records(records: Vec<UnifiedVulnerability>) -> Self {
        Dataset {
            records,
            ..Default::default()
        }
    }

    /// Canonical text: sorted keys, two-space indent, trailing newline.
    pub fn to_canonical(&self) -> String {
        to_canonical_string(self)
    }

    /// Parses a dataset document or a bare array of records.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let body = text.trim_start_matches('\u{feff}');
        let result = if body.trim_start().starts_with('[') {
            serde_json::from_str::<Vec<UnifiedVulnerability>>(body).map(Dataset::from_records)
        } else {
            serde_json::from_str::<Dataset>(body)
        };
        result.map_err(|e| ParseError::from_json(body, &e))
    }

    pub fn read(path: &Path) -> Result<Self, DatasetError> {
        let text = fs::read_to_string(path).map_err(|source| DatasetError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Dataset::parse(&text).map_err(|source| DatasetError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), DatasetError> {
        let err = |source| DatasetError::Write {
            path: path.to_path_buf(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(err)?;
        }
        fs::write(path, self.to_canonical()).map_err(err)
    }
}
