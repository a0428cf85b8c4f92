//! ROUGE-L scoring of extracted records against a baseline.

mod align;
mod report;
mod rouge;

pub use align::{align_records, Alignment, NAME_FLOOR};
pub use report::{evaluate, write_scores_csv, Diagnostic, EvalReport, FieldScore, Flag};
pub use rouge::{classify_similarity, lcs_length, rouge_l, rouge_l_tokens, tokenize, Bucket, EvalConfig, EvalError};
