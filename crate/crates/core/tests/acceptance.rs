//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS or FAIL line.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vulnx::chunking::{build_chunks, segment_records, validate_chunks, ChunkConfig};
use vulnx::cli::{cmd_eval, cmd_extract, Cli, Command};
use vulnx::consolidation::consolidate;
use vulnx::dataset::Dataset;
use vulnx::evaluation::{classify_similarity, lcs_length, Bucket, EvalConfig, EvalReport};
use vulnx::ingest::NormalizedText;
use vulnx::schema::{
    default_mapping, map_fields, parse_record, serialize_record, CvssVersion, Field, SeverityLabel, SourceFields,
    OPENVAS_LABELS,
};
use vulnx::synth::{generate, SynthConfig};
use vulnx::{ScannerKind, UnifiedVulnerability};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- LCS

/// Longest common subsequence by trying every subsequence of the shorter
/// list, longest first.
fn lcs_by_enumeration(a: &[u8], b: &[u8]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let is_subsequence = |sub: &[u8]| {
        let mut it = long.iter();
        sub.iter().all(|x| it.any(|y| y == x))
    };
    let n = short.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let sub: Vec<u8> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| short[i]).collect();
        if is_subsequence(&sub) {
            best = size;
        }
    }
    best
}

/// Textbook full-table dynamic program.
fn lcs_full_table(a: &[u32], b: &[u32]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

fn all_lists(len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..3u8).map(move |s| {
                    let mut w = v.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out
}

fn lcs_oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let lists: Vec<Vec<Vec<u8>>> = (0..=10).map(all_lists).collect();
    let mut exhaustive = 0usize;
    for total in 0..=10 {
        for la in 0..=total {
            for a in &lists[la] {
                for b in &lists[total - la] {
                    let (got, want) = (lcs_length(a, b), lcs_by_enumeration(a, b));
                    check(got == want, || format!("lcs({a:?}, {b:?}) = {got}, oracle {want}"))?;
                    exhaustive += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1c5);
    for _ in 0..500 {
        let alphabet = rng.random_range(2..8u32);
        let a: Vec<u32> = (0..rng.random_range(0..=50)).map(|_| rng.random_range(0..alphabet)).collect();
        let b: Vec<u32> = (0..rng.random_range(0..=50)).map(|_| rng.random_range(0..alphabet)).collect();
        let (got, want) = (lcs_length(&a, &b), lcs_full_table(&a, &b));
        check(got == want, || format!("lcs({a:?}, {b:?}) = {got}, table {want}"))?;
    }
    let elapsed = started.elapsed();
    check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{exhaustive} exhaustive pairs + 500 random pairs in {elapsed:.2?}"))
}

// ---------------------------------------------------------------- buckets

fn bucket_boundaries() -> Outcome {
    let cfg = EvalConfig::default();
    let cases = [
        (0.4, Bucket::Divergent),
        (0.6, Bucket::Slightly),
        (0.7, Bucket::Moderately),
        (0.70001, Bucket::Highly),
        (1.0, Bucket::Highly),
        (0.0, Bucket::Divergent),
    ];
    for (score, want) in cases {
        let got = classify_similarity(score, &cfg);
        check(got == want, || format!("{score} -> {got}, expected {want}"))?;
    }
    Ok("6 boundary scores".into())
}

// ---------------------------------------------------------------- end to end

fn parse_cli(args: &[&str]) -> Command {
    Cli::try_parse_from(std::iter::once("vulnx").chain(args.iter().copied()))
        .expect("valid arguments")
        .command
}

fn run_extract_cmd(args: &[&str]) -> i32 {
    match parse_cli(args) {
        Command::Extract(a) => cmd_extract(&a),
        other => panic!("unexpected {other:?}"),
    }
}

fn run_eval_cmd(extracted: &Path, baseline: &Path, report: &Path) -> Result<EvalReport, String> {
    let code = match parse_cli(&[
        "eval",
        "--extracted",
        extracted.to_str().unwrap(),
        "--baseline",
        baseline.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]) {
        Command::Eval(a) => cmd_eval(&a),
        other => panic!("unexpected {other:?}"),
    };
    check(code == 0, || format!("eval exited {code}"))?;
    let text = std::fs::read_to_string(report).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn end_to_end_fidelity() -> Outcome {
    let started = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let synth = generate(&SynthConfig::default());
    check(synth.baseline.len() == 34, || format!("fixture has {} records", synth.baseline.len()))?;
    let input = dir.path().join("report.txt");
    let baseline = dir.path().join("baseline.json");
    let extracted = dir.path().join("extracted.json");
    std::fs::write(&input, &synth.text).map_err(|e| e.to_string())?;
    Dataset::from_records(synth.baseline).write(&baseline).map_err(|e| e.to_string())?;

    let code = run_extract_cmd(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--output",
        extracted.to_str().unwrap(),
        "--provider",
        "rule",
    ]);
    check(code == 0, || format!("extract exited {code}"))?;
    let report = run_eval_cmd(&extracted, &baseline, &dir.path().join("eval.json"))?;
    let elapsed = started.elapsed();
    check(report.overall_mean >= 0.99, || format!("overall_mean {}", report.overall_mean))?;
    check(report.below_highly_pct <= 1.0, || format!("below_highly_pct {}", report.below_highly_pct))?;
    check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "overall_mean {:.4}, below_highly_pct {:.2}%, {} matched, {elapsed:.2?}",
        report.overall_mean, report.below_highly_pct, report.matched_pairs
    ))
}

// ---------------------------------------------------------------- chunking

fn char_slice(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end - start).collect()
}

fn marker_positions(text: &str, marker: &str) -> Vec<usize> {
    let chars: Vec<char> = text.chars().collect();
    let m: Vec<char> = marker.chars().collect();
    (0..chars.len().saturating_sub(m.len() - 1))
        .filter(|&i| chars[i..i + m.len()] == m[..])
        .collect()
}

fn chunking_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc4);
    let targets = [1000, 2500, 5000, 9000, 12000];
    let mut total_chunks = 0usize;
    let mut splits = 0usize;
    for fixture in 0..100 {
        let n = rng.random_range(1..=50);
        let sizes: Vec<usize> = (0..n).map(|_| rng.random_range(200..=15000)).collect();
        let text = common::chunk_fixture(&mut rng, &sizes);
        let norm = NormalizedText::from_normalized(text.clone());
        let seg = segment_records(&norm, ScannerKind::OpenVas).map_err(|e| e.to_string())?;
        check(seg.records.len() == n, || format!("fixture {fixture}: {} spans for {n} records", seg.records.len()))?;
        let expected: String = seg.records.iter().map(|s| char_slice(&text, s.start, s.end)).collect();
        let mut prev_count = usize::MAX;
        for target in targets {
            let cfg = ChunkConfig {
                target_chars: target,
                ..ChunkConfig::default()
            };
            let chunks = build_chunks(&seg.records, &norm, &cfg).map_err(|e| e.to_string())?;
            let ctx = |what: &str| format!("fixture {fixture}, target {target}: {what}");

            let joined: String = chunks.iter().map(|c| c.fresh_text()).collect();
            check(joined == expected, || ctx("fresh chunk text differs from record text"))?;

            for c in &chunks {
                check(char_slice(&text, c.start, c.end) == c.text, || ctx("chunk text differs from its offsets"))?;
            }

            let mut windows = Vec::new();
            for marker in &cfg.protected_markers {
                for p in marker_positions(&text, marker) {
                    let record_end = seg
                        .records
                        .iter()
                        .find(|s| s.start <= p && p < s.end)
                        .map_or(text.chars().count(), |s| s.end);
                    windows.push((p, (p + cfg.overlap_chars).min(record_end)));
                }
            }
            for c in &chunks {
                for b in [c.start + c.overlap_chars, c.end] {
                    if let Some((p, e)) = windows.iter().find(|(p, e)| *p < b && b < *e) {
                        return Err(ctx(&format!("boundary {b} inside protected window ({p}, {e})")));
                    }
                }
            }

            let report = validate_chunks(&chunks, &seg.records);
            check(report.coverage_complete, || ctx("coverage incomplete"))?;
            check(chunks.len() <= prev_count, || {
                ctx(&format!("{} chunks, up from {prev_count} at a smaller target", chunks.len()))
            })?;
            prev_count = chunks.len();
            total_chunks += chunks.len();
            splits += report.records_split;
        }
    }
    Ok(format!("100 fixtures x {} targets, {total_chunks} chunks, {splits} split records", targets.len()))
}

// ---------------------------------------------------------------- optionsbleed

fn source(pairs: &[(&str, &str)]) -> SourceFields {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn optionsbleed_mapping() -> Outcome {
    let openvas = source(&[
        ("Name", "Apache HTTP Server OPTIONS Memory Leak Vulnerability (OptionsBleed)"),
        ("Severity", "Medium (CVSS: 5.0)"),
        ("Family", "Web Server Vulnerability"),
        ("Summary", "Apache HTTP Server allows remote attackers to read data from process memory."),
        ("Impact", "Allows unauthorized reading of memory blocks from the server."),
        ("Solution", "Update to Apache HTTP Server 2.4.28 or later."),
        (
            "Affected Software/OS",
            "Installed version: 2.2.8\nFixed version: 2.4.28 (or equivalent patch for 2.2.34)",
        ),
        (
            "Vulnerability Detection Method",
            "Apache Web Server Detection (OID: 1.3.6.1.4.1.25623.1.0.900498)",
        ),
        (
            "References",
            "CVE: CVE-2017-9798\nURL: http://openwall.com/lists/oss-security/2017/09/18/2",
        ),
    ]);
    let kind = ScannerKind::OpenVas;
    let r = map_fields(kind, &openvas, &default_mapping(kind).map_err(|e| e.to_string())?);
    let ov_checks = [
        (r.name.as_deref() == Some("Apache HTTP Server OPTIONS Memory Leak Vulnerability (OptionsBleed)"), "name"),
        (r.cves == ["CVE-2017-9798"], "cves"),
        (r.cvss_score == Some(5.0), "cvss_score"),
        (r.severity_label == Some(SeverityLabel::Medium), "severity_label"),
        (r.fixed_version.as_deref() == Some("2.4.28"), "fixed_version"),
        (r.installed_version.as_deref() == Some("2.2.8"), "installed_version"),
        (
            r.impact.as_deref() == Some("Allows unauthorized reading of memory blocks from the server."),
            "impact",
        ),
    ];
    for (ok, field) in ov_checks {
        check(ok, || format!("openvas {field}: {r:?}"))?;
    }

    let tenable = source(&[
        ("Name", "Apache 2.4.x < 2.4.28 HTTP Vulnerability (OptionsBleed)"),
        ("Family", "Component Vulnerability"),
        ("Description", "Versions of Apache 2.4.x prior to 2.4.28 are affected by a vulnerability."),
        ("Solution", "Update to Apache HTTP Server 2.4.28 or later."),
        ("Plugin Details", "Plugin ID 98913\nType: remote"),
        ("Risk Information", "Risk Factor: High\nCVSS v3 Base Score: 7.5"),
        (
            "Reference Information",
            "CVE: CVE-2017-9798\nhttps://httpd.apache.org/security/vulnerabilities_24.html#2.4.28",
        ),
    ]);
    let kind = ScannerKind::TenableWas;
    let t = map_fields(kind, &tenable, &default_mapping(kind).map_err(|e| e.to_string())?);
    let tn_checks = [
        (t.name.as_deref() == Some("Apache 2.4.x < 2.4.28 HTTP Vulnerability (OptionsBleed)"), "name"),
        (t.cves == ["CVE-2017-9798"], "cves"),
        (t.cvss_score == Some(7.5), "cvss_score"),
        (t.severity_label == Some(SeverityLabel::High), "severity_label"),
        (t.cvss_version == Some(CvssVersion::V3), "cvss_version"),
        (t.detection_method.as_deref().is_some_and(|d| d.contains("Plugin ID 98913")), "detection_method"),
        (
            t.references
                .contains(&"https://httpd.apache.org/security/vulnerabilities_24.html#2.4.28".to_string()),
            "references",
        ),
    ];
    for (ok, field) in tn_checks {
        check(ok, || format!("tenable {field}: {t:?}"))?;
    }
    Ok("OptionsBleed in both dialects".into())
}

// ---------------------------------------------------------------- NULL rule

/// Label text that fills every field its label targets, and those targets.
fn null_rule_table() -> Vec<(&'static str, &'static str, Vec<Field>)> {
    use Field::*;
    vec![
        ("Summary", "A summary of the issue.", vec![Description]),
        (
            "Vulnerability Detection Result",
            "Host: 192.168.56.101\nPort: 443/tcp",
            vec![Host, Port, RawFields],
        ),
        ("Impact", "Information disclosure.", vec![Impact]),
        ("Solution", "Apply the vendor patch.", vec![Solution]),
        (
            "Affected Software/OS",
            "Installed version: 1.2.3\nFixed version: 1.2.4",
            vec![InstalledVersion, FixedVersion, RawFields],
        ),
        ("Vulnerability Insight", "Root cause details.", vec![Description]),
        ("Vulnerability Detection Method", "Version check via banner.", vec![DetectionMethod]),
        ("Log Method", "Details: product detection.", vec![RawFields]),
        (
            "References",
            "CVE: CVE-2021-44228\nURL: https://example.org/advisory",
            vec![References, Cves, RawFields],
        ),
    ]
}

fn null_rule() -> Outcome {
    let table = null_rule_table();
    let labels: BTreeSet<&str> = table.iter().map(|(l, _, _)| *l).collect();
    let inventory: BTreeSet<&str> = OPENVAS_LABELS.into_iter().collect();
    check(labels == inventory, || format!("label table {labels:?} differs from {inventory:?}"))?;

    let kind = ScannerKind::OpenVas;
    let mapping = default_mapping(kind).map_err(|e| e.to_string())?;
    let mut all_fields = Field::NULLABLE.to_vec();
    all_fields.push(Field::RawFields);
    for subset in 0u32..(1 << table.len()) {
        let present: Vec<_> = table
            .iter()
            .enumerate()
            .filter(|(i, _)| subset & (1 << i) != 0)
            .map(|(_, e)| e)
            .collect();
        let src: SourceFields = present.iter().map(|(l, t, _)| (l.to_string(), t.to_string())).collect();
        let rec = map_fields(kind, &src, &mapping);
        for field in &all_fields {
            let targeted = present.iter().any(|(_, _, targets)| targets.contains(field));
            check(rec.is_null(*field) != targeted, || {
                format!("subset {subset:09b}: {field:?} null={} but targeted={targeted}", rec.is_null(*field))
            })?;
        }
    }
    Ok("512 label subsets".into())
}

// ---------------------------------------------------------------- consolidation

fn base_record<R: Rng>(rng: &mut R, i: usize) -> UnifiedVulnerability {
    let mut r = UnifiedVulnerability::empty(format!("c{i}"), ScannerKind::OpenVas);
    r.name = Some(format!("Finding {i} {}", rng.random_range(0..1000)));
    if rng.random_bool(0.5) {
        r.cves = vec![format!("CVE-2020-{:04}", rng.random_range(1000..9999))];
    }
    if rng.random_bool(0.5) {
        r.host = Some(format!("10.0.0.{}", rng.random_range(1..255)));
        r.port = Some("443/tcp".into());
    }
    for (slot, p) in [(&mut r.description, 0.7), (&mut r.solution, 0.6), (&mut r.impact, 0.4)] {
        if rng.random_bool(p) {
            *slot = Some(format!("text {}", rng.random_range(0..100)));
        }
    }
    r
}

/// A copy with the same identity and a different NULL profile.
fn variant<R: Rng>(rng: &mut R, r: &UnifiedVulnerability) -> UnifiedVulnerability {
    let mut v = r.clone();
    v.id = format!("{}-dup{}", r.id, rng.random_range(0..1000));
    if rng.random_bool(0.5) {
        v.name = v.name.map(|n| format!("  {}  ", n.to_uppercase()));
    }
    for slot in [&mut v.description, &mut v.solution, &mut v.impact, &mut v.family] {
        if rng.random_bool(0.5) {
            *slot = if slot.is_some() { None } else { Some("filled".into()) };
        }
    }
    v.cves.reverse();
    v
}

fn identity(r: &UnifiedVulnerability) -> (String, Vec<String>, Option<String>, Option<String>) {
    let mut cves: Vec<String> = r.cves.iter().map(|c| c.trim().to_string()).collect();
    cves.sort();
    cves.dedup();
    (
        r.name.as_deref().unwrap_or("").trim().to_lowercase(),
        cves,
        r.host.clone(),
        r.port.clone(),
    )
}

fn consolidation_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0);
    let mut dropped_total = 0;
    for case in 0..200 {
        let n = rng.random_range(1..=25);
        let base: Vec<UnifiedVulnerability> = (0..n).map(|i| base_record(&mut rng, i)).collect();
        let mut list = base.clone();
        for _ in 0..rng.random_range(0..=n) {
            let src = base.choose(&mut rng).unwrap().clone();
            list.push(variant(&mut rng, &src));
        }
        list.shuffle(&mut rng);

        let distinct: BTreeSet<_> = list.iter().map(identity).collect();
        let once = consolidate(&list);
        let ctx = |what: String| format!("case {case}: {what}");
        check(once.records.len() + once.dropped_duplicates == list.len(), || {
            ctx(format!("{} kept + {} dropped != {}", once.records.len(), once.dropped_duplicates, list.len()))
        })?;
        check(once.records.len() == distinct.len(), || {
            ctx(format!("{} kept, {} distinct identities", once.records.len(), distinct.len()))
        })?;
        let twice = consolidate(&once.records);
        check(twice.records == once.records && twice.dropped_duplicates == 0, || ctx("not idempotent".into()))?;

        // Survivor oracle: fewest NULLs, earliest on ties, ordered by first appearance.
        let mut groups: BTreeMap<_, (usize, usize)> = BTreeMap::new();
        for (i, r) in list.iter().enumerate() {
            let nulls = r.null_count();
            groups
                .entry(identity(r))
                .and_modify(|(_, best)| {
                    if nulls < list[*best].null_count() {
                        *best = i;
                    }
                })
                .or_insert((i, i));
        }
        let mut expected: Vec<(usize, usize)> = groups.into_values().collect();
        expected.sort();
        let expected: Vec<&UnifiedVulnerability> = expected.iter().map(|(_, best)| &list[*best]).collect();
        check(once.records.iter().collect::<Vec<_>>() == expected, || ctx("survivors differ from oracle".into()))?;
        dropped_total += once.dropped_duplicates;
    }

    let mut sparse = UnifiedVulnerability::empty("a", ScannerKind::OpenVas);
    sparse.name = Some("Pair".into());
    let mut rich = sparse.clone();
    rich.id = "b".into();
    rich.solution = Some("Patch.".into());
    let kept = consolidate(&[sparse.clone(), rich.clone()]).records;
    check(kept == [rich.clone()], || "richer later record should survive".into())?;
    let kept = consolidate(&[rich.clone(), sparse.clone()]).records;
    check(kept == [rich.clone()], || "richer earlier record should survive".into())?;
    let mut tie = rich.clone();
    tie.id = "c".into();
    tie.solution = None;
    tie.impact = Some("Other field.".into());
    let kept = consolidate(&[rich.clone(), tie.clone()]).records;
    check(kept == [rich], || "earliest should win a tie".into())?;

    Ok(format!("200 lists, {dropped_total} duplicates dropped, 3 constructed pairs"))
}

// ---------------------------------------------------------------- perturbation

fn perturbation_degradation() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let synth = generate(&SynthConfig::default());
    let input = dir.path().join("report.txt");
    let baseline = dir.path().join("baseline.json");
    let extracted = dir.path().join("extracted.json");
    std::fs::write(&input, &synth.text).map_err(|e| e.to_string())?;
    Dataset::from_records(synth.baseline).write(&baseline).map_err(|e| e.to_string())?;
    let code = run_extract_cmd(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--output",
        extracted.to_str().unwrap(),
    ]);
    check(code == 0, || format!("extract exited {code}"))?;
    let clean = Dataset::read(&extracted).map_err(|e| e.to_string())?;
    check(clean.records.len() == 34, || format!("{} records extracted", clean.records.len()))?;

    let mut order: Vec<usize> = (0..34).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x9e));
    let mut series = Vec::new();
    for k in [0usize, 5, 10, 17] {
        let mut ds = clean.clone();
        for &i in &order[..k] {
            ds.records[i].solution = Some("Reboot the coffee machine and wait for lunar alignment.".into());
        }
        let path = dir.path().join(format!("perturbed-{k}.json"));
        ds.write(&path).map_err(|e| e.to_string())?;
        let report = run_eval_cmd(&path, &baseline, &dir.path().join(format!("eval-{k}.json")))?;
        series.push((k, report.below_highly_pct));
    }
    for w in series.windows(2) {
        check(w[1].1 >= w[0].1, || format!("below_highly_pct fell from {:?} to {:?}", w[0], w[1]))?;
    }
    check(series[3].1 > series[0].1, || format!("no degradation at all: {series:?}"))?;
    let shown: Vec<String> = series.iter().map(|(k, p)| format!("k={k}: {p:.2}%")).collect();
    Ok(shown.join(", "))
}

// ---------------------------------------------------------------- round trip

fn round_trip() -> Outcome {
    let mut runner = TestRunner::new(PropConfig {
        cases: 1000,
        failure_persistence: None,
        ..PropConfig::default()
    });
    runner
        .run(&common::record(), |rec| {
            let text = serialize_record(&rec);
            let back = parse_record(&text).map_err(|e| proptest::test_runner::TestCaseError::fail(e.to_string()))?;
            proptest::prop_assert_eq!(&back, &rec);
            proptest::prop_assert_eq!(serialize_record(&back), text);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 fuzzed records".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("lcs oracle equivalence", lcs_oracle_equivalence),
        ("bucket boundaries", bucket_boundaries),
        ("end-to-end fidelity", end_to_end_fidelity),
        ("chunking invariants", chunking_invariants),
        ("optionsbleed mapping", optionsbleed_mapping),
        ("null rule", null_rule),
        ("consolidation properties", consolidation_properties),
        ("perturbation degradation", perturbation_degradation),
        ("record round trip", round_trip),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
