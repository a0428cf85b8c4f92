//! Unified vulnerability record, scanner field mappings, validation and the
//! canonical document codec.

mod codec;
mod mapping;
mod record;
mod validate;

pub use codec::{
    canonicalize, parse_record, parse_records, serialize_record, serialize_records, to_canonical_string,
    write_records_csv, ParseError, CSV_COLUMNS,
};
pub use mapping::{
    default_mapping, map_fields, parse_cvss, parse_location, parse_severity, parse_versions, split_references,
    CvssInfo, FieldMapping, Location, MappingEntry, MappingError, SourceFields, SplitRefs, Transform, FAMILY_KEY,
    NAME_KEY, OPENVAS_LABELS, OTHER_KEY, SEVERITY_KEY, TENABLE_LABELS,
};
pub use record::{CvssVersion, Field, SeverityLabel, UnifiedVulnerability};
pub use validate::{validate_record, Issue, IssueCode, ValidationResult};
