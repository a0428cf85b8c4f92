//! Per-scanner record grammar: how a finding starts and which header lines
//! precede its labelled sections.

use std::sync::LazyLock;

use regex::Regex;

use crate::ingest::ScannerKind;

static OPENVAS_HEADER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^NVT:\s*(.*?)\s*$").unwrap());
static TENABLE_HEADER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(\d{4,7}) - (\S.*?)\s*$").unwrap());

/// Returns the finding name when `line` opens a new record for `kind`.
///
/// OpenVAS findings start with `NVT: <name>`; Tenable WAS findings start with
/// `<plugin id> - <name>`. Unknown reports have no record grammar.
pub fn record_header(kind: ScannerKind, line: &str) -> Option<&str> {
    let re = match kind {
        ScannerKind::OpenVas => &*OPENVAS_HEADER,
        ScannerKind::TenableWas => &*TENABLE_HEADER,
        ScannerKind::Unknown => return None,
    };
    let caps = re.captures(line)?;
    let name = caps.get(caps.len() - 1)?.as_str();
    Some(name)
}

pub fn is_record_header(kind: ScannerKind, line: &str) -> bool {
    record_header(kind, line).is_some()
}

/// Header keys that appear between the record header and the first labelled
/// section, normalized to the intrinsic source keys understood by
/// [`map_fields`](crate::schema::map_fields).
pub fn header_key(key: &str) -> Option<&'static str> {
    match key.trim().to_ascii_lowercase().as_str() {
        "threat" | "severity" | "risk" | "risk factor" => Some(crate::schema::SEVERITY_KEY),
        "family" | "category" | "family / category" => Some(crate::schema::FAMILY_KEY),
        _ => None,
    }
}
