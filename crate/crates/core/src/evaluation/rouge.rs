use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema::Field;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("the baseline holds no records")]
    EmptyBaseline,
    #[error("invalid evaluation config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    Divergent,
    Slightly,
    Moderately,
    Highly,
}

impl Bucket {
    pub const ALL: [Bucket; 4] = [Bucket::Divergent, Bucket::Slightly, Bucket::Moderately, Bucket::Highly];

    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::Divergent => "divergent",
            Bucket::Slightly => "slightly",
            Bucket::Moderately => "moderately",
            Bucket::Highly => "highly",
        }
    }
}

impl std::fmt::Display for Bucket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub divergent_max: f64,
    pub slightly_max: f64,
    pub moderately_max: f64,
    pub beta: f64,
    pub compared_fields: Vec<Field>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            divergent_max: 0.4,
            slightly_max: 0.6,
            moderately_max: 0.7,
            beta: 1.0,
            compared_fields: vec![
                Field::Name,
                Field::Description,
                Field::Impact,
                Field::Solution,
                Field::DetectionMethod,
                Field::References,
                Field::FixedVersion,
                Field::InstalledVersion,
            ],
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        let ordered = 0.0 < self.divergent_max
            && self.divergent_max < self.slightly_max
            && self.slightly_max < self.moderately_max
            && self.moderately_max < 1.0;
        if !ordered {
            return Err(EvalError::Config(format!(
                "thresholds must satisfy 0 < {} < {} < {} < 1",
                self.divergent_max, self.slightly_max, self.moderately_max
            )));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(EvalError::Config(format!("beta must be positive, got {}", self.beta)));
        }
        if self.compared_fields.is_empty() {
            return Err(EvalError::Config("no fields to compare".into()));
        }
        Ok(())
    }
}

const URL_TRAILING: &[char] = &['.', ',', ';', ':', '!', '?', ')', ']', '}', '>', '"', '\''];

fn is_url(token: &str) -> bool {
    token.contains("://")
}

/// Lowercased whitespace-separated tokens with edge punctuation removed.
///
/// Interior punctuation is untouched, so CVE ids and version strings stay
/// whole; URLs additionally keep a trailing `/` or `#`.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let lower = raw.to_lowercase();
            let t = if is_url(&lower) {
                lower
                    .trim_start_matches(|c: char| !c.is_alphanumeric())
                    .trim_end_matches(URL_TRAILING)
            } else {
                lower.trim_matches(|c: char| !c.is_alphanumeric())
            };
            (!t.is_empty()).then(|| t.to_string())
        })
        .collect()
}

/// Longest common subsequence length in O(|a|·|b|) time and
/// O(min(|a|, |b|)) space.
pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

/// ROUGE-L F-measure over [`tokenize`]d text.
pub fn rouge_l(candidate: &str, reference: &str, cfg: &EvalConfig) -> f64 {
    rouge_l_tokens(&tokenize(candidate), &tokenize(reference), cfg.beta)
}

pub fn rouge_l_tokens(candidate: &[String], reference: &[String], beta: f64) -> f64 {
    match (candidate.is_empty(), reference.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let l = lcs_length(candidate, reference);
    if l == 0 {
        return 0.0;
    }
    let p = l as f64 / candidate.len() as f64;
    let r = l as f64 / reference.len() as f64;
    let b2 = beta * beta;
    ((1.0 + b2) * p * r / (r + b2 * p)).clamp(0.0, 1.0)
}

/// Boundaries belong to the lower bucket.
pub fn classify_similarity(score: f64, cfg: &EvalConfig) -> Bucket {
    if score <= cfg.divergent_max {
        Bucket::Divergent
    } else if score <= cfg.slightly_max {
        Bucket::Slightly
    } else if score <= cfg.moderately_max {
        Bucket::Moderately
    } else {
        Bucket::Highly
    }
}
