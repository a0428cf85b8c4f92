//! Continuation stitching, duplicate removal and final validation.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::chunking::Chunk;
use crate::extraction::ExtractionResult;
use crate::ingest::ScannerKind;
use crate::schema::{validate_record, Field, Issue, UnifiedVulnerability};

/// Identity of a finding: name, CVEs, host and port.
pub fn dedup_key(rec: &UnifiedVulnerability) -> String {
    let name = rec.name.as_deref().map(|n| n.trim().to_lowercase()).unwrap_or_default();
    let mut cves: Vec<&str> = rec.cves.iter().map(|c| c.trim()).collect();
    cves.sort_unstable();
    cves.dedup();
    format!(
        "{name}|{}|{}|{}",
        cves.join(","),
        rec.host.as_deref().unwrap_or(""),
        rec.port.as_deref().unwrap_or("")
    )
}

/// A field two parts of one record disagreed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StitchConflict {
    pub record: usize,
    pub part: usize,
    pub field: Field,
    pub kept: String,
    pub discarded: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Stitched {
    pub records: Vec<UnifiedVulnerability>,
    /// Continuation candidates folded into an earlier part.
    pub stitched: usize,
    pub conflicts: Vec<StitchConflict>,
}

fn merge_scalar<T: Clone + PartialEq + std::fmt::Debug>(
    field: Field,
    into: &mut Option<T>,
    from: &Option<T>,
    render: impl Fn(&T) -> String,
    conflicts: &mut Vec<(Field, String, String)>,
) {
    match (into.as_ref(), from) {
        (_, None) => {}
        (None, Some(v)) => *into = Some(v.clone()),
        (Some(a), Some(b)) if a == b => {}
        (Some(a), Some(b)) => {
            let (a, b) = (render(a), render(b));
            // A later part that repeats the earlier text and carries on past
            // the cut completes a truncated value.
            if b.len() > a.len() && b.starts_with(&a) {
                *into = Some(from.clone().unwrap());
            } else {
                conflicts.push((field, a, b));
            }
        }
    }
}

fn merge_list(into: &mut Vec<String>, from: &[String]) {
    for v in from {
        if !into.contains(v) {
            into.push(v.clone());
        }
    }
}

/// Merges `from` into `into` field by field. Returns the conflicting fields
/// with the kept and discarded renderings.
pub fn merge_record(into: &mut UnifiedVulnerability, from: &UnifiedVulnerability) -> Vec<(Field, String, String)> {
    let mut c = Vec::new();
    let s = |v: &String| v.clone();
    merge_scalar(Field::Name, &mut into.name, &from.name, s, &mut c);
    merge_scalar(Field::Description, &mut into.description, &from.description, s, &mut c);
    merge_scalar(Field::InstalledVersion, &mut into.installed_version, &from.installed_version, s, &mut c);
    merge_scalar(Field::FixedVersion, &mut into.fixed_version, &from.fixed_version, s, &mut c);
    merge_scalar(Field::Impact, &mut into.impact, &from.impact, s, &mut c);
    merge_scalar(
        Field::SeverityLabel,
        &mut into.severity_label,
        &from.severity_label,
        |v| v.as_str().to_string(),
        &mut c,
    );
    merge_scalar(Field::CvssScore, &mut into.cvss_score, &from.cvss_score, |v| v.to_string(), &mut c);
    merge_scalar(
        Field::CvssVersion,
        &mut into.cvss_version,
        &from.cvss_version,
        |v| v.as_str().to_string(),
        &mut c,
    );
    merge_scalar(Field::Solution, &mut into.solution, &from.solution, s, &mut c);
    merge_scalar(Field::DetectionMethod, &mut into.detection_method, &from.detection_method, s, &mut c);
    merge_scalar(Field::Family, &mut into.family, &from.family, s, &mut c);
    merge_scalar(Field::Host, &mut into.host, &from.host, s, &mut c);
    merge_scalar(Field::Port, &mut into.port, &from.port, s, &mut c);
    merge_list(&mut into.cves, &from.cves);
    merge_list(&mut into.references, &from.references);
    for (k, v) in &from.raw_fields {
        match into.raw_fields.get(k) {
            None => {
                into.raw_fields.insert(k.clone(), v.clone());
            }
            Some(existing) if existing == v => {}
            Some(existing) if v.len() > existing.len() && v.starts_with(existing.as_str()) => {
                into.raw_fields.insert(k.clone(), v.clone());
            }
            Some(existing) => c.push((Field::RawFields, format!("{k}: {existing}"), format!("{k}: {v}"))),
        }
    }
    c
}

/// Folds candidates from continuation chunks into the candidate for the
/// opening part of the same record. Other candidates pass through in order.
pub fn stitch_continuations(results: &[ExtractionResult], chunks: &[Chunk]) -> Stitched {
    let by_id: HashMap<usize, &Chunk> = chunks.iter().map(|c| (c.id, c)).collect();
    let split_records: HashSet<usize> =
        chunks.iter().filter_map(|c| c.continuation_of.map(|k| k.record)).collect();

    let mut ordered: Vec<&ExtractionResult> = results.iter().collect();
    ordered.sort_by_key(|r| r.chunk_id);

    let mut out = Stitched::default();
    // record index -> position in out.records of its anchor candidate
    let mut anchors: HashMap<usize, usize> = HashMap::new();
    for result in ordered {
        let chunk = by_id.get(&result.chunk_id);
        match chunk.and_then(|c| c.continuation_of) {
            Some(cont) => {
                for cand in &result.candidates {
                    match anchors.get(&cont.record) {
                        Some(&pos) => {
                            let conflicts = merge_record(&mut out.records[pos], cand);
                            for (field, kept, discarded) in conflicts {
                                log::warn!(
                                    "record {} part {}: conflicting {field}, keeping the earlier value",
                                    cont.record,
                                    cont.part
                                );
                                out.conflicts.push(StitchConflict {
                                    record: cont.record,
                                    part: cont.part,
                                    field,
                                    kept,
                                    discarded,
                                });
                            }
                            out.stitched += 1;
                        }
                        None => {
                            anchors.insert(cont.record, out.records.len());
                            out.records.push(cand.clone());
                        }
                    }
                }
            }
            None => {
                let opens_split = chunk
                    .filter(|c| c.record_indices.len() == 1 && split_records.contains(&c.record_indices[0]))
                    .map(|c| c.record_indices[0]);
                for cand in &result.candidates {
                    if let Some(r) = opens_split {
                        anchors.entry(r).or_insert(out.records.len());
                    }
                    out.records.push(cand.clone());
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvalidRecord {
    pub id: String,
    pub violations: Vec<Issue>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConsolidatedSet {
    pub records: Vec<UnifiedVulnerability>,
    pub dropped_duplicates: usize,
    pub stitched_continuations: usize,
    /// Records that failed validation. They stay in `records` as well.
    pub invalid_records: Vec<InvalidRecord>,
}

/// Collapses candidates sharing a [`dedup_key`]. The survivor of each group
/// has the fewest NULL fields (earliest on ties) and takes the position of
/// the group's first appearance.
pub fn consolidate(candidates: &[UnifiedVulnerability]) -> ConsolidatedSet {
    let mut group_of: HashMap<String, usize> = HashMap::new();
    let mut survivors: Vec<usize> = Vec::new();
    for (i, rec) in candidates.iter().enumerate() {
        let key = dedup_key(rec);
        match group_of.get(&key) {
            Some(&g) => {
                if rec.null_count() < candidates[survivors[g]].null_count() {
                    survivors[g] = i;
                }
            }
            None => {
                group_of.insert(key, survivors.len());
                survivors.push(i);
            }
        }
    }
    let records: Vec<UnifiedVulnerability> = survivors.iter().map(|&i| candidates[i].clone()).collect();
    let invalid_records = find_invalid(&records);
    ConsolidatedSet {
        dropped_duplicates: candidates.len() - records.len(),
        records,
        stitched_continuations: 0,
        invalid_records,
    }
}

/// Records that fail [`validate_record`], with their violations.
pub fn find_invalid(records: &[UnifiedVulnerability]) -> Vec<InvalidRecord> {
    records
        .iter()
        .filter_map(|r| {
            let v = validate_record(r);
            (!v.ok).then(|| InvalidRecord {
                id: r.id.clone(),
                violations: v.violations,
            })
        })
        .collect()
}

/// Renumbers ids as `<scanner>-<n>` in record order.
pub fn assign_ids(records: &mut [UnifiedVulnerability], kind: ScannerKind) {
    for (i, r) in records.iter_mut().enumerate() {
        r.id = format!("{kind}-{i}");
    }
}
