use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::align::{align_records, Alignment, NAME_FLOOR};
use super::rouge::{classify_similarity, rouge_l_tokens, tokenize, Bucket, EvalConfig, EvalError};
use crate::schema::{Field, UnifiedVulnerability};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldScore {
    pub record_key: String,
    pub field: Field,
    pub score: f64,
    pub bucket: Bucket,
    /// Both sides NULL. Such rows are counted but left out of every mean.
    pub both_null: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Omission,
    HallucinationSuspected,
    DuplicateSuspected,
    TruncationSuspected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub record_key: String,
    pub flag: Flag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Field>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub per_field_mean: BTreeMap<Field, f64>,
    pub per_record_mean: BTreeMap<String, f64>,
    pub overall_mean: f64,
    pub bucket_counts: BTreeMap<Bucket, usize>,
    pub below_highly_pct: f64,
    pub scored_count: usize,
    pub both_null_count: usize,
    pub matched_pairs: usize,
    pub unmatched_candidates: usize,
    pub unmatched_baseline: usize,
    pub diagnostics: Vec<Diagnostic>,
    pub scores: Vec<FieldScore>,
}

fn ends_sentence(text: &str) -> bool {
    text.trim_end().ends_with(['.', '!', '?', ';', ')', '"', '\''])
}

fn score_pair(
    key: &str,
    cand: &UnifiedVulnerability,
    base: &UnifiedVulnerability,
    cfg: &EvalConfig,
    scores: &mut Vec<FieldScore>,
    diagnostics: &mut Vec<Diagnostic>,
) {
    for &field in &cfg.compared_fields {
        let (c, b) = (cand.field_text(field), base.field_text(field));
        let (score, both_null) = match (&c, &b) {
            (None, None) => (1.0, true),
            (None, Some(_)) | (Some(_), None) => (0.0, false),
            (Some(c), Some(b)) => {
                let (ct, bt) = (tokenize(c), tokenize(b));
                if !ct.is_empty() && ct.len() < bt.len() && bt.starts_with(&ct) && !ends_sentence(c) {
                    diagnostics.push(Diagnostic {
                        record_key: key.to_string(),
                        flag: Flag::TruncationSuspected,
                        field: Some(field),
                    });
                }
                (rouge_l_tokens(&ct, &bt, cfg.beta), false)
            }
        };
        scores.push(FieldScore {
            record_key: key.to_string(),
            field,
            score,
            bucket: classify_similarity(score, cfg),
            both_null,
        });
    }
}

/// A leftover candidate that resembles an already paired baseline record
/// is a likely duplicate; otherwise it may be invented.
fn leftover_flag(
    cand: &UnifiedVulnerability,
    baseline: &[UnifiedVulnerability],
    alignment: &Alignment,
) -> Flag {
    let name = cand.name.as_deref().map(tokenize);
    let resembles = alignment.pairs.iter().any(|&(_, j)| {
        let b = &baseline[j];
        let cve = cand.cves.iter().any(|c| b.cves.contains(c));
        let named = match (&name, b.name.as_deref()) {
            (Some(n), Some(bn)) => rouge_l_tokens(n, &tokenize(bn), 1.0) >= NAME_FLOOR,
            _ => false,
        };
        cve || named
    });
    if resembles {
        Flag::DuplicateSuspected
    } else {
        Flag::HallucinationSuspected
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Scores `extracted` against `baseline` field by field.
///
/// Baseline records with no counterpart score 0 on every compared field.
/// Candidates with no counterpart are only flagged.
pub fn evaluate(
    extracted: &[UnifiedVulnerability],
    baseline: &[UnifiedVulnerability],
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    cfg.validate()?;
    if baseline.is_empty() {
        return Err(EvalError::EmptyBaseline);
    }
    let alignment = align_records(extracted, baseline);
    let mut scores = Vec::new();
    let mut diagnostics = Vec::new();

    for &(i, j) in &alignment.pairs {
        score_pair(&baseline[j].id, &extracted[i], &baseline[j], cfg, &mut scores, &mut diagnostics);
    }
    for &j in &alignment.unmatched_baseline {
        let key = &baseline[j].id;
        diagnostics.push(Diagnostic {
            record_key: key.clone(),
            flag: Flag::Omission,
            field: None,
        });
        for &field in &cfg.compared_fields {
            scores.push(FieldScore {
                record_key: key.clone(),
                field,
                score: 0.0,
                bucket: classify_similarity(0.0, cfg),
                both_null: false,
            });
        }
    }
    for &i in &alignment.unmatched_candidates {
        diagnostics.push(Diagnostic {
            record_key: extracted[i].id.clone(),
            flag: leftover_flag(&extracted[i], baseline, &alignment),
            field: None,
        });
    }

    scores.sort_by(|a, b| a.record_key.cmp(&b.record_key).then(a.field.cmp(&b.field)));
    diagnostics.sort_by(|a, b| {
        a.record_key
            .cmp(&b.record_key)
            .then(a.flag.cmp(&b.flag))
            .then(a.field.cmp(&b.field))
    });

    let scored: Vec<&FieldScore> = scores.iter().filter(|s| !s.both_null).collect();
    let mut per_field_mean = BTreeMap::new();
    for &field in &cfg.compared_fields {
        let values: Vec<f64> = scored.iter().filter(|s| s.field == field).map(|s| s.score).collect();
        if !values.is_empty() {
            per_field_mean.insert(field, mean(values.into_iter()));
        }
    }
    let mut per_record: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for s in &scored {
        per_record.entry(s.record_key.clone()).or_default().push(s.score);
    }
    let per_record_mean = per_record
        .into_iter()
        .map(|(k, v)| (k, mean(v.into_iter())))
        .collect();
    let mut bucket_counts: BTreeMap<Bucket, usize> = Bucket::ALL.iter().map(|b| (*b, 0)).collect();
    for s in &scored {
        *bucket_counts.get_mut(&s.bucket).unwrap() += 1;
    }
    let below = scored.len() - bucket_counts[&Bucket::Highly];
    let below_highly_pct = if scored.is_empty() {
        0.0
    } else {
        100.0 * below as f64 / scored.len() as f64
    };

    Ok(EvalReport {
        config: cfg.clone(),
        per_field_mean,
        per_record_mean,
        overall_mean: mean(scored.iter().map(|s| s.score)),
        bucket_counts,
        below_highly_pct,
        scored_count: scored.len(),
        both_null_count: scores.len() - scored.len(),
        matched_pairs: alignment.pairs.len(),
        unmatched_candidates: alignment.unmatched_candidates.len(),
        unmatched_baseline: alignment.unmatched_baseline.len(),
        diagnostics,
        scores,
    })
}

/// Writes one `record_key,field,score,bucket` row per scored field.
pub fn write_scores_csv<W: Write>(report: &EvalReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["record_key", "field", "score", "bucket"])?;
    for s in report.scores.iter().filter(|s| !s.both_null) {
        w.write_record([
            s.record_key.as_str(),
            s.field.as_str(),
            &format!("{:.6}", s.score),
            s.bucket.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
