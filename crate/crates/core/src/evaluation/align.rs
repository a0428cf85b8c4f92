use serde::{Deserialize, Serialize};

use super::rouge::{rouge_l_tokens, tokenize};
use crate::schema::UnifiedVulnerability;

/// Minimum name similarity for a pairing without a shared CVE.
pub const NAME_FLOOR: f64 = 0.3;

/// Index pairs `(candidate, baseline)` plus the leftovers on each side.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_candidates: Vec<usize>,
    pub unmatched_baseline: Vec<usize>,
}

fn name_tokens(r: &UnifiedVulnerability) -> Option<Vec<String>> {
    r.name.as_deref().map(tokenize)
}

fn name_score(a: &Option<Vec<String>>, b: &Option<Vec<String>>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => rouge_l_tokens(a, b, 1.0),
        _ => 0.0,
    }
}

fn greedy(
    mut scored: Vec<(f64, usize, usize)>,
    used_c: &mut [bool],
    used_b: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
) {
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    for (_, c, b) in scored {
        if !used_c[c] && !used_b[b] {
            used_c[c] = true;
            used_b[b] = true;
            pairs.push((c, b));
        }
    }
}

/// Pairs candidates with baseline records.
///
/// Records sharing a CVE are paired first, highest name similarity first.
/// The rest are paired greedily by name similarity down to [`NAME_FLOOR`].
/// Ties go to the lower candidate index, then the lower baseline index.
pub fn align_records(candidates: &[UnifiedVulnerability], baseline: &[UnifiedVulnerability]) -> Alignment {
    let cn: Vec<_> = candidates.iter().map(name_tokens).collect();
    let bn: Vec<_> = baseline.iter().map(name_tokens).collect();
    let mut used_c = vec![false; candidates.len()];
    let mut used_b = vec![false; baseline.len()];
    let mut pairs = Vec::new();

    let mut shared = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        for (j, b) in baseline.iter().enumerate() {
            if c.cves.iter().any(|cve| b.cves.iter().any(|x| x.eq_ignore_ascii_case(cve))) {
                shared.push((name_score(&cn[i], &bn[j]), i, j));
            }
        }
    }
    greedy(shared, &mut used_c, &mut used_b, &mut pairs);

    let mut by_name = Vec::new();
    for i in (0..candidates.len()).filter(|&i| !used_c[i]) {
        for j in (0..baseline.len()).filter(|&j| !used_b[j]) {
            let s = name_score(&cn[i], &bn[j]);
            if s >= NAME_FLOOR {
                by_name.push((s, i, j));
            }
        }
    }
    greedy(by_name, &mut used_c, &mut used_b, &mut pairs);

    pairs.sort_unstable();
    Alignment {
        pairs,
        unmatched_candidates: (0..candidates.len()).filter(|&i| !used_c[i]).collect(),
        unmatched_baseline: (0..baseline.len()).filter(|&j| !used_b[j]).collect(),
    }
}
