use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ingest::ScannerKind;

/// Severity as reported by the scanner.
///
/// Labels outside the four known values are kept as `Unrecognized` so that
/// validation can report them instead of silently dropping them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeverityLabel {
    Low,
    Medium,
    High,
    Critical,
    Unrecognized(String),
}

impl SeverityLabel {
    pub fn as_str(&self) -> &str {
        match self {
            SeverityLabel::Low => "low",
            SeverityLabel::Medium => "medium",
            SeverityLabel::High => "high",
            SeverityLabel::Critical => "critical",
            SeverityLabel::Unrecognized(s) => s,
        }
    }

    /// Exact canonical spelling; anything else is `Unrecognized`.
    pub fn from_canonical(s: &str) -> Self {
        match s {
            "low" => SeverityLabel::Low,
            "medium" => SeverityLabel::Medium,
            "high" => SeverityLabel::High,
            "critical" => SeverityLabel::Critical,
            other => SeverityLabel::Unrecognized(other.to_string()),
        }
    }

    /// Case-insensitive match against the four known labels.
    pub fn parse_loose(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "low" => Some(SeverityLabel::Low),
            "medium" | "moderate" => Some(SeverityLabel::Medium),
            "high" => Some(SeverityLabel::High),
            "critical" => Some(SeverityLabel::Critical),
            _ => None,
        }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, SeverityLabel::Unrecognized(_))
    }
}

impl Serialize for SeverityLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SeverityLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(SeverityLabel::from_canonical(&s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CvssVersion {
    V2,
    V3,
    V4,
}

impl CvssVersion {
    pub fn from_major(major: char) -> Option<Self> {
        match major {
            '2' => Some(CvssVersion::V2),
            '3' => Some(CvssVersion::V3),
            '4' => Some(CvssVersion::V4),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CvssVersion::V2 => "v2",
            CvssVersion::V3 => "v3",
            CvssVersion::V4 => "v4",
        }
    }
}

/// One finding in the unified, scanner-independent shape.
///
/// Absent source information is `None` (or an empty list), never an empty
/// string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnifiedVulnerability {
    pub id: String,
    pub scanner: ScannerKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub cves: Vec<String>,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub installed_version: Option<String>,
    #[serde(default)]
    pub fixed_version: Option<String>,
    #[serde(default)]
    pub impact: Option<String>,
    #[serde(default)]
    pub severity_label: Option<SeverityLabel>,
    #[serde(default)]
    pub cvss_score: Option<f64>,
    #[serde(default)]
    pub cvss_version: Option<CvssVersion>,
    #[serde(default)]
    pub solution: Option<String>,
    #[serde(default)]
    pub detection_method: Option<String>,
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub references: Vec<String>,
    #[serde(default)]
    pub host: Option<String>,
    #[serde(default)]
    pub port: Option<String>,
    #[serde(default)]
    pub raw_fields: BTreeMap<String, String>,
}

impl UnifiedVulnerability {
    /// A record with every nullable field NULL.
    pub fn empty(id: impl Into<String>, scanner: ScannerKind) -> Self {
        UnifiedVulnerability {
            id: id.into(),
            scanner,
            name: None,
            cves: Vec::new(),
            description: None,
            installed_version: None,
            fixed_version: None,
            impact: None,
            severity_label: None,
            cvss_score: None,
            cvss_version: None,
            solution: None,
            detection_method: None,
            family: None,
            references: Vec::new(),
            host: None,
            port: None,
            raw_fields: BTreeMap::new(),
        }
    }

    /// Number of NULL scalar fields plus empty list fields.
    pub fn null_count(&self) -> usize {
        Field::NULLABLE.iter().filter(|f| self.is_null(**f)).count()
    }

    pub fn is_null(&self, field: Field) -> bool {
        match field {
            Field::Name => self.name.is_none(),
            Field::Cves => self.cves.is_empty(),
            Field::Description => self.description.is_none(),
            Field::InstalledVersion => self.installed_version.is_none(),
            Field::FixedVersion => self.fixed_version.is_none(),
            Field::Impact => self.impact.is_none(),
            Field::SeverityLabel => self.severity_label.is_none(),
            Field::CvssScore => self.cvss_score.is_none(),
            Field::CvssVersion => self.cvss_version.is_none(),
            Field::Solution => self.solution.is_none(),
            Field::DetectionMethod => self.detection_method.is_none(),
            Field::Family => self.family.is_none(),
            Field::References => self.references.is_empty(),
            Field::Host => self.host.is_none(),
            Field::Port => self.port.is_none(),
            Field::RawFields => self.raw_fields.is_empty(),
        }
    }

    /// Field value rendered as text for comparison; lists join with newlines.
    pub fn field_text(&self, field: Field) -> Option<String> {
        let join = |v: &[String]| (!v.is_empty()).then(|| v.join("\n"));
        match field {
            Field::Name => self.name.clone(),
            Field::Cves => join(&self.cves),
            Field::Description => self.description.clone(),
            Field::InstalledVersion => self.installed_version.clone(),
            Field::FixedVersion => self.fixed_version.clone(),
            Field::Impact => self.impact.clone(),
            Field::SeverityLabel => self.severity_label.as_ref().map(|s| s.as_str().to_string()),
            Field::CvssScore => self.cvss_score.map(|s| s.to_string()),
            Field::CvssVersion => self.cvss_version.map(|v| v.as_str().to_string()),
            Field::Solution => self.solution.clone(),
            Field::DetectionMethod => self.detection_method.clone(),
            Field::Family => self.family.clone(),
            Field::References => join(&self.references),
            Field::Host => self.host.clone(),
            Field::Port => self.port.clone(),
            Field::RawFields => (!self.raw_fields.is_empty()).then(|| {
                self.raw_fields
                    .iter()
                    .map(|(k, v)| format!("{k}: {v}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            }),
        }
    }

    /// Every string the record carries, for character-level checks.
    pub(crate) fn strings(&self) -> Vec<(Field, &str)> {
        let mut out = Vec::new();
        let scalars = [
            (Field::Name, &self.name),
            (Field::Description, &self.description),
            (Field::InstalledVersion, &self.installed_version),
            (Field::FixedVersion, &self.fixed_version),
            (Field::Impact, &self.impact),
            (Field::Solution, &self.solution),
            (Field::DetectionMethod, &self.detection_method),
            (Field::Family, &self.family),
            (Field::Host, &self.host),
            (Field::Port, &self.port),
        ];
        for (f, v) in scalars {
            if let Some(s) = v {
                out.push((f, s.as_str()));
            }
        }
        if let Some(SeverityLabel::Unrecognized(s)) = &self.severity_label {
            out.push((Field::SeverityLabel, s.as_str()));
        }
        out.extend(self.cves.iter().map(|s| (Field::Cves, s.as_str())));
        out.extend(self.references.iter().map(|s| (Field::References, s.as_str())));
        for (k, v) in &self.raw_fields {
            out.push((Field::RawFields, k.as_str()));
            out.push((Field::RawFields, v.as_str()));
        }
        out
    }
}

/// Names of [`UnifiedVulnerability`] fields that mappings can target and
/// evaluation can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Name,
    Cves,
    Description,
    InstalledVersion,
    FixedVersion,
    Impact,
    SeverityLabel,
    CvssScore,
    CvssVersion,
    Solution,
    DetectionMethod,
    Family,
    References,
    Host,
    Port,
    RawFields,
}

impl Field {
    /// Fields that can be NULL (or empty, for lists).
    pub const NULLABLE: [Field; 15] = [
        Field::Name,
        Field::Cves,
        Field::Description,
        Field::InstalledVersion,
        Field::FixedVersion,
        Field::Impact,
        Field::SeverityLabel,
        Field::CvssScore,
        Field::CvssVersion,
        Field::Solution,
        Field::DetectionMethod,
        Field::Family,
        Field::References,
        Field::Host,
        Field::Port,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Name => "name",
            Field::Cves => "cves",
            Field::Description => "description",
            Field::InstalledVersion => "installed_version",
            Field::FixedVersion => "fixed_version",
            Field::Impact => "impact",
            Field::SeverityLabel => "severity_label",
            Field::CvssScore => "cvss_score",
            Field::CvssVersion => "cvss_version",
            Field::Solution => "solution",
            Field::DetectionMethod => "detection_method",
            Field::Family => "family",
            Field::References => "references",
            Field::Host => "host",
            Field::Port => "port",
            Field::RawFields => "raw_fields",
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Field::NULLABLE
            .iter()
            .chain(std::iter::once(&Field::RawFields))
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown field `{s}`"))
    }
}
