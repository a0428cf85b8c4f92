use std::path::Path;
use std::process::{Command, Output};

use vulnx::dataset::Dataset;
use vulnx::synth::{generate, SynthConfig};
use vulnx::ScannerKind;

fn vulnx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vulnx"))
        .args(args)
        .env_remove("VULNX_API_BASE")
        .env_remove("VULNX_API_KEY")
        .output()
        .expect("binary runs")
}

fn write_fixture(dir: &Path, kind: ScannerKind) -> (String, String) {
    let report = generate(&SynthConfig {
        kind,
        ..SynthConfig::default()
    });
    let input = dir.join("report.txt");
    let baseline = dir.join("baseline.json");
    std::fs::write(&input, &report.text).unwrap();
    Dataset::from_records(report.baseline).write(&baseline).unwrap();
    (input.display().to_string(), baseline.display().to_string())
}

#[test]
fn rule_extract_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let (input, baseline) = write_fixture(dir.path(), ScannerKind::OpenVas);
    let out = dir.path().join("out.json").display().to_string();
    let csv = dir.path().join("records.csv").display().to_string();
    let o = vulnx(&["extract", "--input", &input, "--output", &out, "--csv", &csv]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let ds = Dataset::read(Path::new(&out)).unwrap();
    assert_eq!(ds.records.len(), 34);
    assert!(ds.gaps.is_empty());
    let meta = ds.metadata.unwrap();
    assert_eq!(meta.provider, "rule");
    assert_eq!(meta.scanner, ScannerKind::OpenVas);
    assert_eq!(csv::Reader::from_path(&csv).unwrap().records().count(), 34);

    let report = dir.path().join("eval.json").display().to_string();
    let scores = dir.path().join("scores.csv").display().to_string();
    let o = vulnx(&["eval", "--extracted", &out, "--baseline", &baseline, "--report", &report, "--csv", &scores]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("overall_mean: 1.000000"), "{stdout}");
    let header = std::fs::read_to_string(&scores).unwrap();
    assert!(header.starts_with("record_key,field,score,bucket\n"));
}

#[test]
fn one_failing_chunk_is_partial_success() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = write_fixture(dir.path(), ScannerKind::TenableWas);
    let script = dir.path().join("script.json");
    std::fs::write(
        &script,
        r#"{"default": ["[{\"name\": \"Scripted finding\", \"cves\": [\"CVE-2020-0001\"]}]"],
            "chunks": {"1": [{"error": {"kind": "auth", "detail": "denied"}}]}}"#,
    )
    .unwrap();
    let out = dir.path().join("out.json").display().to_string();
    let o = vulnx(&[
        "extract",
        "--input",
        &input,
        "--output",
        &out,
        "--provider",
        "mock",
        "--mock-script",
        script.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let ds = Dataset::read(Path::new(&out)).unwrap();
    assert_eq!(ds.gaps.len(), 1);
    assert_eq!(ds.gaps[0].chunk_id, 1);
    assert!(!ds.gaps[0].record_indices.is_empty());
    // Identical scripted replies collapse into one record.
    assert_eq!(ds.records.len(), 1);
    assert_eq!(ds.metadata.unwrap().counts.chunks_failed, 1);
}

#[test]
fn unreachable_endpoint_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = write_fixture(dir.path(), ScannerKind::OpenVas);
    let out = dir.path().join("out.json");
    let o = vulnx(&[
        "extract",
        "--input",
        &input,
        "--output",
        out.to_str().unwrap(),
        "--provider",
        "http",
        "--model-name",
        "test-model",
        "--endpoint",
        "http://127.0.0.1:1/v1",
        "--max-retries",
        "0",
        "--timeout-seconds",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no dataset written"));
}

#[test]
fn detect_and_chunk() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = write_fixture(dir.path(), ScannerKind::TenableWas);
    let o = vulnx(&["detect", "--input", &input]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "tenable_was");

    let dump = dir.path().join("dump");
    let o = vulnx(&["chunk", "--input", &input, "--dump-dir", dump.to_str().unwrap(), "--target-chars", "4000", "--hard-max-chars", "6000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("coverage_complete: true"));
    assert!(dump.join("manifest.json").exists());
}

#[test]
fn missing_input_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let o = vulnx(&["extract", "--input", "/nonexistent/report.txt", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn bad_chunk_budget_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = write_fixture(dir.path(), ScannerKind::OpenVas);
    let o = vulnx(&["chunk", "--input", &input, "--dump-dir", "d", "--target-chars", "100", "--hard-max-chars", "50"]);
    assert_eq!(o.status.code(), Some(1));
}
