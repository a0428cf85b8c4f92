use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::chunking::Chunk;
use crate::ingest::ScannerKind;
use crate::schema::{FieldMapping, Transform, FAMILY_KEY, OTHER_KEY, SEVERITY_KEY};

pub const BUILTIN_TEMPLATE: &str = include_str!("../../templates/extract_v1.txt");
pub const BUILTIN_TEMPLATE_VERSION: &str = "extract-v1";

pub const CHUNK_TEXT: &str = "{chunk_text}";
pub const SCANNER: &str = "{scanner}";
pub const FIELD_INSTRUCTIONS: &str = "{field_instructions}";
const PLACEHOLDERS: [&str; 3] = [CHUNK_TEXT, SCANNER, FIELD_INSTRUCTIONS];

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("template is missing the {0} placeholder")]
    Missing(&'static str),
    #[error("template contains the {0} placeholder more than once")]
    Duplicated(&'static str),
    #[error("cannot build a prompt without a scanner dialect")]
    UnknownScanner,
    #[error("cannot read template {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A prompt body with exactly one of each placeholder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    body: String,
    version: String,
}

impl PromptTemplate {
    pub fn new(body: impl Into<String>, version: impl Into<String>) -> Result<Self, TemplateError> {
        let body = body.into();
        check_placeholders(&body)?;
        Ok(PromptTemplate {
            body,
            version: version.into(),
        })
    }

    pub fn builtin() -> Self {
        PromptTemplate::new(BUILTIN_TEMPLATE, BUILTIN_TEMPLATE_VERSION).expect("builtin template is valid")
    }

    /// Loads a template file; its version is derived from the content hash.
    pub fn from_file(path: &Path) -> Result<Self, TemplateError> {
        let body = std::fs::read_to_string(path).map_err(|source| TemplateError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        PromptTemplate::new(body, format!("file-{}", &digest[..12]))
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Substitutes the three placeholders in one pass, so placeholder-like
    /// text inside the substituted values is left alone.
    pub fn render(&self, chunk_text: &str, scanner: &str, field_instructions: &str) -> String {
        let mut slots: Vec<(usize, &str, &str)> = PLACEHOLDERS
            .iter()
            .zip([chunk_text, scanner, field_instructions])
            .filter_map(|(p, v)| self.body.find(p).map(|at| (at, *p, v)))
            .collect();
        slots.sort_by_key(|s| s.0);
        let mut out = String::with_capacity(self.body.len() + chunk_text.len() + field_instructions.len());
        let mut pos = 0;
        for (at, placeholder, value) in slots {
            out.push_str(&self.body[pos..at]);
            out.push_str(value);
            pos = at + placeholder.len();
        }
        out.push_str(&self.body[pos..]);
        out
    }
}

fn check_placeholders(body: &str) -> Result<(), TemplateError> {
    for p in PLACEHOLDERS {
        match body.matches(p).count() {
            0 => return Err(TemplateError::Missing(p)),
            1 => {}
            _ => return Err(TemplateError::Duplicated(p)),
        }
    }
    Ok(())
}

fn transform_hint(t: Transform) -> &'static str {
    match t {
        Transform::Verbatim => "copy the section text verbatim",
        Transform::AppendToTarget => "append the section text after any text already in the field",
        Transform::ParseCvss => {
            "take the CVSS base score (newest CVSS version if several), its version as v2/v3/v4, and the severity label"
        }
        Transform::ParseVersions => "take the values written after \"Installed version:\" and \"Fixed version:\"",
        Transform::SplitReferences => "list each URL or advisory id in references and each CVE id in cves",
        Transform::ParseLocation => "take the host and the port of the affected service",
        Transform::ParseSeverity => "take the severity label",
        Transform::RawOnly => "keep the section text only in raw_fields",
    }
}

fn record_boundary_hint(kind: ScannerKind) -> &'static str {
    match kind {
        ScannerKind::OpenVas => "Each finding starts with a line \"NVT: <name>\"; the text after \"NVT: \" is the name.",
        ScannerKind::TenableWas => {
            "Each finding starts with a line \"<plugin id> - <name>\"; the text after \" - \" is the name."
        }
        ScannerKind::Unknown => "",
    }
}

/// Mapping instructions, the NULL rule and the output schema.
pub fn field_instructions(kind: ScannerKind, mapping: &FieldMapping) -> String {
    let mut s = String::new();
    writeln!(s, "{}", record_boundary_hint(kind)).unwrap();
    writeln!(
        s,
        "Header lines before the first section: a \"Threat:\" or \"{SEVERITY_KEY}:\" line gives severity_label, \
         cvss_score and cvss_version; a \"{FAMILY_KEY}:\" line gives family."
    )
    .unwrap();
    writeln!(s, "\nSource section -> target field(s):").unwrap();
    for e in &mapping.entries {
        let targets: Vec<&str> = e.targets.iter().map(|f| f.as_str()).collect();
        write!(s, "- \"{}\" -> {}: {}", e.source_label, targets.join(", "), transform_hint(e.transform)).unwrap();
        if e.transform.keeps_raw() && e.transform != Transform::RawOnly {
            write!(s, "; also keep the full section text in raw_fields under \"{}\"", e.source_label).unwrap();
        }
        s.push('\n');
    }
    writeln!(
        s,
        "- any other labelled text -> raw_fields under \"{OTHER_KEY}\" as \"<label>: <text>\""
    )
    .unwrap();
    s.push_str(
        "\nRules:\n\
         - Fields absent from the text must be null; never invent values.\n\
         - Copy text exactly as written; do not paraphrase, summarize or translate.\n\
         - cves holds only identifiers written in the text as CVE-YYYY-NNNN.\n\
         - If the block continues a finding from an earlier block (no header line), return one record with \
         name null and only the fields this block shows.\n\
         - Return an empty array if the block holds no findings.\n",
    );
    s.push_str(
        "\nOutput: a JSON array with one object per finding, using exactly these keys:\n\
         \"name\": string|null, \"cves\": [string], \"description\": string|null, \
         \"installed_version\": string|null, \"fixed_version\": string|null, \"impact\": string|null, \
         \"severity_label\": \"low\"|\"medium\"|\"high\"|\"critical\"|null, \"cvss_score\": number|null, \
         \"cvss_version\": \"v2\"|\"v3\"|\"v4\"|null, \"solution\": string|null, \"detection_method\": string|null, \
         \"family\": string|null, \"references\": [string], \"host\": string|null, \"port\": string|null, \
         \"raw_fields\": {label: string}",
    );
    s
}

pub fn build_prompt(
    chunk: &Chunk,
    kind: ScannerKind,
    mapping: &FieldMapping,
    tmpl: &PromptTemplate,
) -> Result<String, TemplateError> {
    if kind == ScannerKind::Unknown {
        return Err(TemplateError::UnknownScanner);
    }
    check_placeholders(&tmpl.body)?;
    Ok(tmpl.render(&chunk.text, kind.display_name(), &field_instructions(kind, mapping)))
}

/// Instruction appended when a reply could not be parsed.
pub fn corrective_suffix(error: &str) -> String {
    format!(
        "\n\nYour previous reply could not be parsed ({error}). Reply again with only a JSON array of \
         objects using the keys listed above, and nothing else."
    )
}
