//! End-to-end extraction: ingest, chunk, extract, stitch, consolidate.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::chunking::{build_chunks, segment_records, validate_chunks, Chunk, ChunkConfig, ChunkError, ChunkReport};
use crate::consolidation::{assign_ids, consolidate, find_invalid, stitch_continuations};
use crate::dataset::{Dataset, Gap, RunCounts, RunMetadata};
use crate::extraction::{
    build_provider, extract_all, ChunkFailure, PromptTemplate, ProviderConfig, ProviderError, TemplateError,
};
use crate::ingest::{detect_scanner, normalize_text, read_report, IngestError, NormalizedText, ScannerKind};
use crate::schema::{default_mapping, MappingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScannerChoice {
    #[default]
    Auto,
    Openvas,
    Tenable,
}

impl ScannerChoice {
    /// Resolves to a concrete dialect, detecting it when set to auto.
    pub fn resolve(self, norm: &NormalizedText) -> ScannerKind {
        match self {
            ScannerChoice::Auto => detect_scanner(norm),
            ScannerChoice::Openvas => ScannerKind::OpenVas,
            ScannerChoice::Tenable => ScannerKind::TenableWas,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub scanner: ScannerChoice,
    pub provider: ProviderConfig,
    pub chunking: ChunkConfig,
    pub prompt_template: Option<PathBuf>,
    pub output_path: PathBuf,
    pub parallelism: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(input_path: impl Into<PathBuf>, output_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            input_path: input_path.into(),
            scanner: ScannerChoice::Auto,
            provider: ProviderConfig::default(),
            chunking: ChunkConfig::default(),
            prompt_template: None,
            output_path: output_path.into(),
            parallelism: 4,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.parallelism == 0 {
            return Err(PipelineError::Config("parallelism must be positive".into()));
        }
        self.chunking.validate()?;
        self.provider.validate()?;
        Ok(())
    }

    /// SHA-256 of the canonical config document.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(crate::schema::to_canonical_string(self).as_bytes()))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("could not tell which scanner produced the report; pass --scanner")]
    UnknownScanner,
    #[error(transparent)]
    Chunk(#[from] ChunkError),
    #[error("chunking lost track of records (missing {missing:?}, duplicated {duplicated:?}, broken chains {broken:?})")]
    Coverage {
        missing: Vec<usize>,
        duplicated: Vec<usize>,
        broken: Vec<usize>,
    },
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("all {} chunk(s) failed; first failure: {}", .0.len(), .0[0])]
    AllChunksFailed(Vec<ChunkFailure>),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Report text prepared for extraction.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub normalized: NormalizedText,
    pub input_sha256: String,
    pub kind: ScannerKind,
    pub chunks: Vec<Chunk>,
    pub report: ChunkReport,
}

/// Reads, normalizes, segments and chunks a report.
pub fn prepare(input: &Path, scanner: ScannerChoice, cfg: &ChunkConfig) -> Result<Prepared, PipelineError> {
    cfg.validate()?;
    let raw = read_report(input, None)?;
    let input_sha256 = hex::encode(Sha256::digest(raw.content.as_bytes()));
    let normalized = normalize_text(&raw);
    let kind = scanner.resolve(&normalized);
    if kind == ScannerKind::Unknown {
        return Err(PipelineError::UnknownScanner);
    }
    let segmentation = segment_records(&normalized, kind)?;
    let chunks = build_chunks(&segmentation.records, &normalized, cfg)?;
    let report = validate_chunks(&chunks, &segmentation.records);
    log::info!(
        "{} record(s) in {} chunk(s), mean {:.0} chars",
        segmentation.records.len(),
        report.chunk_count,
        report.mean_chunk_chars
    );
    Ok(Prepared {
        normalized,
        input_sha256,
        kind,
        chunks,
        report,
    })
}

/// Result of an extraction run that produced a dataset.
#[derive(Debug, Clone)]
pub struct ExtractOutcome {
    pub dataset: Dataset,
    pub chunk_report: ChunkReport,
    pub failures: Vec<ChunkFailure>,
}

impl ExtractOutcome {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Runs the whole pipeline. Nothing is written to disk.
pub fn run_extract(cfg: &RunConfig) -> Result<ExtractOutcome, PipelineError> {
    cfg.validate()?;
    let prepared = prepare(&cfg.input_path, cfg.scanner, &cfg.chunking)?;
    if !prepared.report.coverage_complete {
        return Err(PipelineError::Coverage {
            missing: prepared.report.missing_records.clone(),
            duplicated: prepared.report.duplicated_records.clone(),
            broken: prepared.report.broken_chains.clone(),
        });
    }
    let kind = prepared.kind;
    let mapping = default_mapping(kind)?;
    let template = match &cfg.prompt_template {
        Some(path) => PromptTemplate::from_file(path)?,
        None => PromptTemplate::builtin(),
    };
    let provider = build_provider(&cfg.provider, kind, &mapping)?;
    let outcomes = extract_all(
        provider.as_ref(),
        &prepared.chunks,
        kind,
        &mapping,
        &template,
        &cfg.provider,
        cfg.parallelism,
    )?;

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => results.push(r),
            Err(f) => {
                log::warn!("{f}");
                failures.push(f);
            }
        }
    }
    if results.is_empty() && !failures.is_empty() {
        return Err(PipelineError::AllChunksFailed(failures));
    }

    let candidates: usize = results.iter().map(|r| r.candidates.len()).sum();
    let stitched = stitch_continuations(&results, &prepared.chunks);
    let mut set = consolidate(&stitched.records);
    set.stitched_continuations = stitched.stitched;
    assign_ids(&mut set.records, kind);
    set.invalid_records = find_invalid(&set.records);

    let gaps = failures
        .iter()
        .map(|f| {
            let chunk = prepared.chunks.iter().find(|c| c.id == f.chunk_id);
            Gap {
                chunk_id: f.chunk_id,
                record_indices: chunk.map(|c| c.record_indices.clone()).unwrap_or_default(),
                continuation_of: chunk.and_then(|c| c.continuation_of),
                attempts: f.attempts,
                cause: f.cause.clone(),
                last_response: f.last_response.clone(),
            }
        })
        .collect();

    let metadata = RunMetadata {
        tool_version: crate::TOOL_VERSION.to_string(),
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        input_sha256: prepared.input_sha256,
        scanner: kind,
        provider: provider.name().to_string(),
        model: provider.model().to_string(),
        temperature: cfg.provider.temperature,
        template_version: template.version().to_string(),
        config_digest: cfg.digest(),
        seed: cfg.seed,
        config: serde_json::to_value(cfg).expect("config serializes"),
        counts: RunCounts {
            chunks: prepared.chunks.len(),
            chunks_failed: failures.len(),
            records_split: prepared.report.records_split,
            candidates,
            stitched_continuations: set.stitched_continuations,
            dropped_duplicates: set.dropped_duplicates,
            records: set.records.len(),
            invalid_records: set.invalid_records.len(),
        },
    };

    Ok(ExtractOutcome {
        dataset: Dataset {
            metadata: Some(metadata),
            records: set.records,
            gaps,
            invalid_records: set.invalid_records,
        },
        chunk_report: prepared.report,
        failures,
    })
}
