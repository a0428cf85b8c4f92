//! Normalize OpenVAS and Tenable WAS vulnerability reports into a unified
//! dataset and score extractions against an analyst baseline.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! 1. [`ingest`] reads a `.pdf` or `.txt` report, normalizes line structure
//!    and strips page artifacts, and guesses which scanner produced it.
//! 2. [`chunking`] segments the text into per-finding spans and packs them
//!    into character-budgeted chunks that never cut inside a protected
//!    technical section.
//! 3. [`extraction`] renders a field-mapping prompt per chunk and sends it to
//!    a [`Provider`](extraction::Provider) (HTTP chat-completions, scripted
//!    mock, or the deterministic rule extractor).
//! 4. [`consolidation`] stitches split records, removes duplicates and
//!    validates the survivors.
//! 5. [`evaluation`] scores a dataset against a baseline with ROUGE-L.
//!
//! [`pipeline`] wires stages 1-4 together; the `vulnx` binary exposes them on
//! the command line.

pub mod chunking;
pub mod cli;
pub mod consolidation;
pub mod dataset;
pub mod dialect;
pub mod evaluation;
pub mod extraction;
pub mod ingest;
pub mod pipeline;
pub mod schema;
pub mod synth;

pub use ingest::ScannerKind;
pub use schema::UnifiedVulnerability;

/// Version string recorded in run metadata.
pub const TOOL_VERSION: &str = concat!("vulnx ", env!("CARGO_PKG_VERSION"));
