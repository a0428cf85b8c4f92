use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::record::{Field, UnifiedVulnerability};

static CVE_PATTERN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^CVE-\d{4}-\d{4,}$").unwrap());
static REFERENCE_PATTERN: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)^(?:(?:https?|ftp)://\S+|CVE-\d{4}-\d{4,}|CWE-\d+|GHSA(?:-[0-9a-z]{4}){3}|RHSA-\d{4}:\d+|DSA-\d+(?:-\d+)?|USN-\d+-\d+|MS\d{2}-\d{3}|VU#\d+|BID:?\s*\d+)$",
    )
    .unwrap()
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueCode {
    MalformedCve,
    OutOfRange,
    InvalidSeverity,
    ControlCharacter,
    EmptyValue,
    MissingCvssVersion,
    UnrecognizedReference,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub field: Field,
    pub code: IssueCode,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationResult {
    pub ok: bool,
    pub violations: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

fn issue(field: Field, code: IssueCode, message: impl Into<String>) -> Issue {
    Issue {
        field,
        code,
        message: message.into(),
    }
}

fn has_control(s: &str) -> bool {
    s.chars().any(|c| c.is_control() && c != '\n' && c != '\t')
}

/// Checks a record's syntactic conformity.
pub fn validate_record(rec: &UnifiedVulnerability) -> ValidationResult {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    for cve in &rec.cves {
        if !CVE_PATTERN.is_match(cve) {
            violations.push(issue(Field::Cves, IssueCode::MalformedCve, format!("`{cve}` is not CVE-YYYY-NNNN")));
        }
    }
    if let Some(score) = rec.cvss_score {
        if !(0.0..=10.0).contains(&score) {
            violations.push(issue(
                Field::CvssScore,
                IssueCode::OutOfRange,
                format!("{score} is outside [0.0, 10.0]"),
            ));
        }
        if rec.cvss_version.is_none() {
            warnings.push(issue(
                Field::CvssVersion,
                IssueCode::MissingCvssVersion,
                "cvss_score present without cvss_version",
            ));
        }
    }
    if let Some(sev) = &rec.severity_label {
        if !sev.is_known() {
            violations.push(issue(
                Field::SeverityLabel,
                IssueCode::InvalidSeverity,
                format!("`{}` is not one of low, medium, high, critical", sev.as_str()),
            ));
        }
    }
    for (field, s) in rec.strings() {
        if has_control(s) {
            violations.push(issue(field, IssueCode::ControlCharacter, "contains NUL or control characters"));
        }
    }
    for field in Field::NULLABLE {
        if rec.field_text(field).is_some_and(|t| t.trim().is_empty()) {
            violations.push(issue(field, IssueCode::EmptyValue, "empty string where NULL is expected"));
        }
    }
    for r in &rec.references {
        if !REFERENCE_PATTERN.is_match(r.trim()) {
            warnings.push(issue(
                Field::References,
                IssueCode::UnrecognizedReference,
                format!("`{r}` is neither a URL nor an advisory identifier"),
            ));
        }
    }

    ValidationResult {
        ok: violations.is_empty(),
        violations,
        warnings,
    }
}
