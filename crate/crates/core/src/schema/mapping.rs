//! Scanner-specific field mappings onto the unified record.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::{CvssVersion, Field, SeverityLabel, UnifiedVulnerability};
use crate::ingest::ScannerKind;

/// Section labels found in OpenVAS findings.
pub const OPENVAS_LABELS: [&str; 9] = [
    "Summary",
    "Vulnerability Detection Result",
    "Impact",
    "Solution",
    "Affected Software/OS",
    "Vulnerability Insight",
    "Vulnerability Detection Method",
    "Log Method",
    "References",
];

/// Section labels found in Tenable WAS findings.
pub const TENABLE_LABELS: [&str; 10] = [
    "Affected Application",
    "Description",
    "Solution",
    "See Also",
    "Vulnerability Properties",
    "Discovery",
    "VPR Key Drivers",
    "Plugin Details",
    "Risk Information",
    "Reference Information",
];

/// `raw_fields` key for source text whose label no mapping recognizes.
pub const OTHER_KEY: &str = "Other";

/// Intrinsic source key carrying the finding name from the record header.
pub const NAME_KEY: &str = "Name";
/// Intrinsic source key carrying the header severity line, e.g. `Medium (CVSS: 5.0)`.
pub const SEVERITY_KEY: &str = "Severity";
/// Intrinsic source key carrying the family or category line.
pub const FAMILY_KEY: &str = "Family";

/// Labelled source text for one finding, keyed by section label.
pub type SourceFields = BTreeMap<String, String>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MappingError {
    #[error("no field mapping exists for scanner `{0}`")]
    UnknownScanner(ScannerKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// Copy the trimmed text into the target.
    Verbatim,
    /// Append to whatever an earlier entry already put in the target.
    AppendToTarget,
    /// Pull a CVSS score, version and severity label.
    ParseCvss,
    /// Pull `Installed version:` / `Fixed version:` values.
    ParseVersions,
    /// Split into reference URLs/advisory ids and CVE identifiers.
    SplitReferences,
    /// Pull a host and port from URLs, `host:port` or `80/tcp` forms.
    ParseLocation,
    /// Pull a severity label only.
    ParseSeverity,
    /// Keep the text in `raw_fields` only.
    RawOnly,
}

impl Transform {
    /// Whether the source text is also preserved verbatim in `raw_fields`.
    pub fn keeps_raw(self) -> bool {
        !matches!(self, Transform::Verbatim | Transform::AppendToTarget)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Transform::Verbatim => "verbatim",
            Transform::AppendToTarget => "append_to_target",
            Transform::ParseCvss => "parse_cvss",
            Transform::ParseVersions => "parse_versions",
            Transform::SplitReferences => "split_references",
            Transform::ParseLocation => "parse_location",
            Transform::ParseSeverity => "parse_severity",
            Transform::RawOnly => "raw_only",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub source_label: String,
    pub targets: Vec<Field>,
    pub transform: Transform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMapping {
    pub scanner: ScannerKind,
    pub entries: Vec<MappingEntry>,
}

impl FieldMapping {
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.source_label.as_str())
    }

    /// Looks up the entry for a label, ignoring case and a trailing colon.
    pub fn entry_for(&self, label: &str) -> Option<&MappingEntry> {
        let key = clean_label(label);
        self.entries
            .iter()
            .find(|e| e.source_label.eq_ignore_ascii_case(key))
    }
}

fn clean_label(label: &str) -> &str {
    label.trim().trim_end_matches(':').trim_end()
}

fn entry(label: &str, targets: &[Field], transform: Transform) -> MappingEntry {
    MappingEntry {
        source_label: label.to_string(),
        targets: targets.to_vec(),
        transform,
    }
}

pub fn default_mapping(kind: ScannerKind) -> Result<FieldMapping, MappingError> {
    use Field::*;
    use Transform::*;
    let entries = match kind {
        ScannerKind::OpenVas => vec![
            entry("Summary", &[Description], Verbatim),
            entry("Vulnerability Detection Result", &[Host, Port], ParseLocation),
            entry("Impact", &[Impact], Verbatim),
            entry("Solution", &[Solution], Verbatim),
            entry("Affected Software/OS", &[InstalledVersion, FixedVersion], ParseVersions),
            entry("Vulnerability Insight", &[Description], AppendToTarget),
            entry("Vulnerability Detection Method", &[DetectionMethod], Verbatim),
            entry("Log Method", &[RawFields], RawOnly),
            entry("References", &[References, Cves], SplitReferences),
        ],
        ScannerKind::TenableWas => vec![
            entry("Affected Application", &[Host, Port], ParseLocation),
            entry("Description", &[Description], Verbatim),
            entry("Solution", &[Solution], Verbatim),
            entry("See Also", &[References, Cves], SplitReferences),
            entry("Vulnerability Properties", &[SeverityLabel], ParseSeverity),
            entry("Discovery", &[RawFields], RawOnly),
            entry("VPR Key Drivers", &[RawFields], RawOnly),
            entry("Plugin Details", &[DetectionMethod], Verbatim),
            entry("Risk Information", &[CvssScore, CvssVersion, SeverityLabel], ParseCvss),
            entry("Reference Information", &[References, Cves], SplitReferences),
        ],
        ScannerKind::Unknown => return Err(MappingError::UnknownScanner(kind)),
    };
    Ok(FieldMapping {
        scanner: kind,
        entries,
    })
}

/// Applies `mapping` to labelled source text.
///
/// Fields with no contributing source text stay NULL. Intrinsic header keys
/// ([`NAME_KEY`], [`SEVERITY_KEY`], [`FAMILY_KEY`]) are applied before the
/// mapping entries; labels neither intrinsic nor mapped are kept under
/// `raw_fields["Other"]`. The returned id is the bare scanner name; callers
/// assign the ordinal.
pub fn map_fields(kind: ScannerKind, source: &SourceFields, mapping: &FieldMapping) -> UnifiedVulnerability {
    debug_assert_eq!(mapping.scanner, kind, "mapping dialect must match the record");
    let mut rec = UnifiedVulnerability::empty(kind.as_str(), kind);
    let mut other: Vec<String> = Vec::new();

    let mut intrinsic: BTreeMap<&str, &str> = BTreeMap::new();
    let mut labelled: Vec<(&MappingEntry, &str)> = Vec::new();
    for (label, text) in source {
        let key = clean_label(label);
        if let Some(k) = [NAME_KEY, SEVERITY_KEY, FAMILY_KEY]
            .into_iter()
            .find(|k| k.eq_ignore_ascii_case(key))
        {
            intrinsic.insert(k, text);
        } else if let Some(e) = mapping.entry_for(key) {
            labelled.push((e, text));
        } else if key == OTHER_KEY {
            if let Some(t) = non_empty(text) {
                other.push(t.to_string());
            }
        } else if let Some(t) = non_empty(text) {
            other.push(format!("{key}: {t}"));
        }
    }

    if let Some(name) = intrinsic.get(NAME_KEY).and_then(|t| non_empty(t)) {
        rec.name = Some(name.to_string());
    }
    if let Some(sev) = intrinsic.get(SEVERITY_KEY) {
        let info = parse_cvss(sev);
        rec.severity_label = info.severity;
        rec.cvss_score = info.score;
        rec.cvss_version = info.version;
    }
    if let Some(family) = intrinsic.get(FAMILY_KEY).and_then(|t| non_empty(t)) {
        rec.family = Some(family.to_string());
    }

    // Entries apply in mapping order so appends follow their base field.
    labelled.sort_by_key(|(e, _)| {
        mapping
            .entries
            .iter()
            .position(|m| std::ptr::eq(m, *e))
            .unwrap_or(usize::MAX)
    });
    for (e, text) in labelled {
        apply_entry(&mut rec, e, text);
    }

    if !other.is_empty() {
        rec.raw_fields.insert(OTHER_KEY.to_string(), other.join("\n"));
    }
    rec
}

fn non_empty(text: &str) -> Option<&str> {
    let t = text.trim();
    (!t.is_empty()).then_some(t)
}

fn set_if_null(slot: &mut Option<String>, value: Option<&str>) {
    if slot.is_none() {
        if let Some(v) = value {
            *slot = Some(v.to_string());
        }
    }
}

fn extend_unique(list: &mut Vec<String>, items: impl IntoIterator<Item = String>) {
    for item in items {
        if !list.contains(&item) {
            list.push(item);
        }
    }
}

fn apply_entry(rec: &mut UnifiedVulnerability, e: &MappingEntry, text: &str) {
    let Some(text) = non_empty(text) else {
        return;
    };
    if e.transform.keeps_raw() {
        let slot = rec.raw_fields.entry(e.source_label.clone()).or_default();
        if slot.is_empty() {
            *slot = text.to_string();
        } else {
            slot.push('\n');
            slot.push_str(text);
        }
    }
    for target in &e.targets {
        match e.transform {
            Transform::Verbatim => {
                if let Some(slot) = text_slot(rec, *target) {
                    set_if_null(slot, Some(text));
                }
            }
            Transform::AppendToTarget => {
                if let Some(slot) = text_slot(rec, *target) {
                    match slot {
                        Some(existing) => {
                            existing.push('\n');
                            existing.push_str(text);
                        }
                        None => *slot = Some(text.to_string()),
                    }
                }
            }
            Transform::ParseCvss | Transform::ParseSeverity => {
                let info = if e.transform == Transform::ParseCvss {
                    parse_cvss(text)
                } else {
                    CvssInfo {
                        severity: parse_severity(text),
                        ..CvssInfo::default()
                    }
                };
                match target {
                    Field::CvssScore if rec.cvss_score.is_none() => rec.cvss_score = info.score,
                    Field::CvssVersion if rec.cvss_version.is_none() => rec.cvss_version = info.version,
                    Field::SeverityLabel if rec.severity_label.is_none() => rec.severity_label = info.severity,
                    _ => {}
                }
            }
            Transform::ParseVersions => {
                let (installed, fixed) = parse_versions(text);
                match target {
                    Field::InstalledVersion => set_if_null(&mut rec.installed_version, installed),
                    Field::FixedVersion => set_if_null(&mut rec.fixed_version, fixed),
                    _ => {}
                }
            }
            Transform::ParseLocation => {
                let loc = parse_location(text);
                match target {
                    Field::Host => set_if_null(&mut rec.host, loc.host),
                    Field::Port => set_if_null(&mut rec.port, loc.port),
                    _ => {}
                }
            }
            Transform::SplitReferences => {
                let refs = split_references(text);
                match target {
                    Field::References => extend_unique(&mut rec.references, refs.references),
                    Field::Cves => extend_unique(&mut rec.cves, refs.cves),
                    _ => {}
                }
            }
            Transform::RawOnly => {}
        }
    }
}

fn text_slot(rec: &mut UnifiedVulnerability, field: Field) -> Option<&mut Option<String>> {
    Some(match field {
        Field::Name => &mut rec.name,
        Field::Description => &mut rec.description,
        Field::InstalledVersion => &mut rec.installed_version,
        Field::FixedVersion => &mut rec.fixed_version,
        Field::Impact => &mut rec.impact,
        Field::Solution => &mut rec.solution,
        Field::DetectionMethod => &mut rec.detection_method,
        Field::Family => &mut rec.family,
        Field::Host => &mut rec.host,
        Field::Port => &mut rec.port,
        _ => return None,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CvssInfo {
    pub score: Option<f64>,
    pub version: Option<CvssVersion>,
    pub severity: Option<SeverityLabel>,
}

static CVSS_VERSIONED: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\bCVSS\s*v?([234])(?:\.\d)?(?:\s+base)?(?:\s+score)?\s*[:=]?\s*(\d{1,2}(?:\.\d{1,2})?)").unwrap()
});
static CVSS_PLAIN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\bCVSS(?:\s+base)?(?:\s+score)?\s*:\s*(\d{1,2}(?:\.\d{1,2})?)").unwrap()
});
static SEVERITY_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?im)^\s*(?:risk factor|severity|threat|risk)\s*:\s*(critical|high|medium|low)\b").unwrap()
});
static SEVERITY_WORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(critical|high|medium|low)\b").unwrap());

/// A numeric match is a score only if it is not the prefix of a vector
/// string (`CVSS:3.0/AV:N/...`) or a longer number.
fn is_score_end(text: &str, end: usize) -> bool {
    !matches!(text[end..].chars().next(), Some('/' | '.' | '0'..='9'))
}

pub fn parse_cvss(text: &str) -> CvssInfo {
    let mut best: Option<(CvssVersion, f64)> = None;
    for caps in CVSS_VERSIONED.captures_iter(text) {
        let score_m = caps.get(2).unwrap();
        if !is_score_end(text, score_m.end()) {
            continue;
        }
        let Some(version) = caps[1].chars().next().and_then(CvssVersion::from_major) else {
            continue;
        };
        let Ok(score) = score_m.as_str().parse::<f64>() else {
            continue;
        };
        // Prefer the newest CVSS version the text reports.
        if best.is_none_or(|(v, _)| version > v) {
            best = Some((version, score));
        }
    }
    let (score, version) = match best {
        Some((v, s)) => (Some(s), Some(v)),
        None => {
            let plain = CVSS_PLAIN.captures_iter(text).find_map(|caps| {
                let m = caps.get(1).unwrap();
                is_score_end(text, m.end())
                    .then(|| m.as_str().parse::<f64>().ok())
                    .flatten()
            });
            (plain, None)
        }
    };
    CvssInfo {
        score,
        version,
        severity: parse_severity(text),
    }
}

pub fn parse_severity(text: &str) -> Option<SeverityLabel> {
    SEVERITY_LINE
        .captures(text)
        .or_else(|| SEVERITY_WORD.captures(text))
        .and_then(|c| SeverityLabel::parse_loose(&c[1]))
}

static INSTALLED_VERSION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\binstalled\s+version\s*:\s*v?(\d[\w.\-+~]*)").unwrap());
static FIXED_VERSION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bfixed\s+version\s*:\s*v?(\d[\w.\-+~]*)").unwrap());
static BEFORE_VERSION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:\bprior to|\bbefore|<)\s*v?(\d+(?:\.\w+)+)").unwrap());

fn trim_version(v: &str) -> &str {
    v.trim_end_matches(['.', ',', ';', ':', '-'])
}

/// Returns `(installed, fixed)` versions found in the text.
pub fn parse_versions(text: &str) -> (Option<&str>, Option<&str>) {
    let installed = INSTALLED_VERSION
        .captures(text)
        .map(|c| trim_version(c.get(1).unwrap().as_str()));
    let fixed = FIXED_VERSION
        .captures(text)
        .or_else(|| BEFORE_VERSION.captures(text))
        .map(|c| trim_version(c.get(1).unwrap().as_str()));
    (installed, fixed)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Location<'a> {
    pub host: Option<&'a str>,
    pub port: Option<&'a str>,
}

static HOST_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?im)^\s*(?:host|hostname|ip|ip address)\s*:\s*(\S+)").unwrap());
static PORT_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?im)^\s*port\s*:\s*(\S+)").unwrap());
static URL_AUTHORITY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:https?|ftp)://([^/\s:?#]+)(?::(\d{1,5}))?").unwrap());
static PROTO_PORT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(\d{1,5}/(?:tcp|udp))\b").unwrap());
static IPV4: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d{1,3}(?:\.\d{1,3}){3}").unwrap());

pub fn parse_location(text: &str) -> Location<'_> {
    let url = URL_AUTHORITY.captures(text);
    let ipv4 = IPV4.find_iter(text).find(|m| {
        let before = text[..m.start()].chars().next_back();
        let after = text[m.end()..].chars().next();
        !matches!(before, Some('.' | '0'..='9')) && !matches!(after, Some('.' | '0'..='9'))
    });
    let host = HOST_LINE
        .captures(text)
        .map(|c| c.get(1).unwrap().as_str())
        .or_else(|| url.as_ref().map(|c| c.get(1).unwrap().as_str()))
        .or_else(|| ipv4.map(|m| m.as_str()));
    let port = PORT_LINE
        .captures(text)
        .map(|c| c.get(1).unwrap().as_str())
        .or_else(|| PROTO_PORT.captures(text).map(|c| c.get(1).unwrap().as_str()))
        .or_else(|| url.as_ref().and_then(|c| c.get(2)).map(|m| m.as_str()));
    Location { host, port }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitRefs {
    pub references: Vec<String>,
    pub cves: Vec<String>,
}

static CVE_ID: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\bCVE-\d{4}-\d{4,}\b").unwrap());
static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)\b(?:https?|ftp)://[^\s<>"'\]\)]+"#).unwrap());
static ADVISORY_ID: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"\b(?:CWE-\d+|GHSA(?:-[0-9a-z]{4}){3}|RHSA-\d{4}:\d+|DSA-\d+(?:-\d+)?|USN-\d+-\d+|MS\d{2}-\d{3}|VU#\d+)\b")
        .unwrap()
});

pub fn split_references(text: &str) -> SplitRefs {
    let mut out = SplitRefs::default();
    let mut found: Vec<(usize, String)> = URL
        .find_iter(text)
        .map(|m| (m.start(), m.as_str().trim_end_matches(['.', ',', ';', ':']).to_string()))
        .collect();
    found.extend(
        ADVISORY_ID
            .find_iter(text)
            .filter(|m| !URL.find_iter(text).any(|u| u.start() <= m.start() && m.end() <= u.end()))
            .map(|m| (m.start(), m.as_str().to_string())),
    );
    found.sort_by_key(|(pos, _)| *pos);
    extend_unique(&mut out.references, found.into_iter().map(|(_, s)| s));
    extend_unique(
        &mut out.cves,
        CVE_ID
            .find_iter(text)
            .filter(|m| !URL.find_iter(text).any(|u| u.start() <= m.start() && m.end() <= u.end()))
            .map(|m| m.as_str().to_string()),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn openvas_labels_match_inventory() {
        let m = default_mapping(ScannerKind::OpenVas).unwrap();
        let labels: Vec<&str> = m.labels().collect();
        assert_eq!(labels, OPENVAS_LABELS);
        let summary = m.entry_for("Summary").unwrap();
        assert_eq!(summary.targets, vec![Field::Description]);
        assert_eq!(summary.transform, Transform::Verbatim);
    }

    #[test]
    fn tenable_labels_match_inventory() {
        let m = default_mapping(ScannerKind::TenableWas).unwrap();
        let labels: Vec<&str> = m.labels().collect();
        assert_eq!(labels, TENABLE_LABELS);
        let risk = m.entry_for("Risk Information").unwrap();
        assert_eq!(risk.transform, Transform::ParseCvss);
        assert!(risk.targets.contains(&Field::CvssScore));
        assert!(risk.targets.contains(&Field::CvssVersion));
    }

    #[test]
    fn unknown_scanner_has_no_mapping() {
        assert_eq!(
            default_mapping(ScannerKind::Unknown),
            Err(MappingError::UnknownScanner(ScannerKind::Unknown))
        );
    }

    #[test]
    fn label_lookup_is_lenient() {
        let m = default_mapping(ScannerKind::OpenVas).unwrap();
        assert!(m.entry_for("impact:").is_some());
        assert!(m.entry_for("  Solution  ").is_some());
        assert!(m.entry_for("Solution type").is_none());
    }

    #[test]
    fn cvss_header_line() {
        let info = parse_cvss("Medium (CVSS: 5.0)");
        assert_eq!(info.score, Some(5.0));
        assert_eq!(info.version, None);
        assert_eq!(info.severity, Some(SeverityLabel::Medium));
    }

    #[test]
    fn cvss_prefers_newest_version_and_skips_vectors() {
        let text = "Risk Factor: High\nCVSSv2 Base Score: 5.0\nCVSSv2 Vector: AV:N/AC:L/Au:N/C:P/I:N/A:N\n\
                    CVSSv3 Base Score: 7.5\nCVSSv3 Vector: CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:N/A:N";
        let info = parse_cvss(text);
        assert_eq!(info.score, Some(7.5));
        assert_eq!(info.version, Some(CvssVersion::V3));
        assert_eq!(info.severity, Some(SeverityLabel::High));
        assert_eq!(parse_cvss("CVSS:3.1/AV:N/AC:L").score, None);
    }

    #[test]
    fn versions() {
        let (i, f) = parse_versions("Installed version: 2.2.8\nFixed version: 2.4.28 (or equivalent patch for 2.2.34)");
        assert_eq!(i, Some("2.2.8"));
        assert_eq!(f, Some("2.4.28"));
        let (i, f) = parse_versions("Versions of Apache 2.4.x prior to 2.4.28 are affected.");
        assert_eq!(i, None);
        assert_eq!(f, Some("2.4.28"));
    }

    #[test]
    fn location() {
        let loc = parse_location("Installation path / port: 80/tcp\nURL: http://192.168.56.101/server-status");
        assert_eq!(loc.host, Some("192.168.56.101"));
        assert_eq!(loc.port, Some("80/tcp"));
        let loc = parse_location("Application: https://shop.example.org:8443/login");
        assert_eq!(loc.host, Some("shop.example.org"));
        assert_eq!(loc.port, Some("8443"));
        let loc = parse_location("OID 1.3.6.1.4.1.25623.1.0.900498 only");
        assert_eq!(loc.host, None);
        assert_eq!(loc.port, None);
    }

    #[test]
    fn references_and_cves() {
        let refs = split_references(
            "CVE: CVE-2017-9798\nBID: 100872\nOther:\n  http://openwall.com/lists/oss-security/2017/09/18/2.\n  CWE-401",
        );
        assert_eq!(refs.cves, vec!["CVE-2017-9798"]);
        assert_eq!(
            refs.references,
            vec!["http://openwall.com/lists/oss-security/2017/09/18/2", "CWE-401"]
        );
    }

    #[test]
    fn cve_inside_url_is_a_reference_only() {
        let refs = split_references("https://nvd.nist.gov/vuln/detail/CVE-2017-9798");
        assert!(refs.cves.is_empty());
        assert_eq!(refs.references.len(), 1);
    }

    #[test]
    fn empty_source_is_all_null() {
        let m = default_mapping(ScannerKind::OpenVas).unwrap();
        let rec = map_fields(ScannerKind::OpenVas, &SourceFields::new(), &m);
        assert_eq!(rec.null_count(), Field::NULLABLE.len());
        assert!(rec.raw_fields.is_empty());
    }

    #[test]
    fn unknown_labels_go_to_other() {
        let m = default_mapping(ScannerKind::OpenVas).unwrap();
        let mut src = SourceFields::new();
        src.insert("Quality of Detection".into(), "80%".into());
        src.insert("Impact".into(), "   ".into());
        let rec = map_fields(ScannerKind::OpenVas, &src, &m);
        assert_eq!(rec.raw_fields[OTHER_KEY], "Quality of Detection: 80%");
        assert_eq!(rec.impact, None);
    }

    #[test]
    fn insight_appends_after_summary() {
        let m = default_mapping(ScannerKind::OpenVas).unwrap();
        let mut src = SourceFields::new();
        src.insert("Vulnerability Insight".into(), "insight".into());
        src.insert("Summary".into(), "summary".into());
        let rec = map_fields(ScannerKind::OpenVas, &src, &m);
        assert_eq!(rec.description.as_deref(), Some("summary\ninsight"));
    }
}
