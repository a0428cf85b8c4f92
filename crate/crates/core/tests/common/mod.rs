#![allow(dead_code)]

use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::Rng;

use vulnx::schema::{CvssVersion, SeverityLabel};
use vulnx::{ScannerKind, UnifiedVulnerability};

pub fn text() -> impl Strategy<Value = String> {
    "[A-Za-z0-9][ -~\t\nàéü€中]{0,60}"
}

fn opt_text() -> impl Strategy<Value = Option<String>> {
    prop::option::of(text())
}

fn reference() -> impl Strategy<Value = String> {
    prop_oneof![
        "https://[a-z]{3,10}\\.(org|com|net)/[a-z0-9/_.-]{1,20}",
        "CWE-[0-9]{1,4}",
        "USN-[0-9]{3,5}-[0-9]",
    ]
}

fn severity() -> impl Strategy<Value = SeverityLabel> {
    prop_oneof![
        Just(SeverityLabel::Low),
        Just(SeverityLabel::Medium),
        Just(SeverityLabel::High),
        Just(SeverityLabel::Critical),
    ]
}

fn cvss_version() -> impl Strategy<Value = CvssVersion> {
    prop_oneof![Just(CvssVersion::V2), Just(CvssVersion::V3), Just(CvssVersion::V4)]
}

/// Records that pass validation, covering every field.
pub fn record() -> impl Strategy<Value = UnifiedVulnerability> {
    let head = (
        "(openvas|tenable_was)-[0-9]{1,3}",
        prop_oneof![Just(ScannerKind::OpenVas), Just(ScannerKind::TenableWas)],
        opt_text(),
        prop::collection::vec("CVE-(19|20)[0-9]{2}-[0-9]{4,6}", 0..4),
        opt_text(),
        prop::option::of("[0-9]{1,2}\\.[0-9]{1,2}(\\.[0-9]{1,3})?"),
        prop::option::of("[0-9]{1,2}\\.[0-9]{1,2}(\\.[0-9]{1,3})?"),
        opt_text(),
    );
    let tail = (
        prop::option::of(severity()),
        prop::option::of((0u8..=100, cvss_version())),
        opt_text(),
        opt_text(),
        opt_text(),
        prop::collection::vec(reference(), 0..4),
        prop::option::of("[a-z0-9.-]{1,20}"),
        prop::option::of("[0-9]{1,5}(/tcp|/udp)?"),
        prop::collection::btree_map("[A-Za-z][A-Za-z /]{0,15}", text(), 0..3),
    );
    (head, tail).prop_map(
        |(
            (id, scanner, name, cves, description, installed_version, fixed_version, impact),
            (severity_label, cvss, solution, detection_method, family, references, host, port, raw_fields),
        )| UnifiedVulnerability {
            id,
            scanner,
            name,
            cves,
            description,
            installed_version,
            fixed_version,
            impact,
            severity_label,
            cvss_score: cvss.map(|(s, _)| f64::from(s) / 10.0),
            cvss_version: cvss.map(|(_, v)| v),
            solution,
            detection_method,
            family,
            references,
            host,
            port,
            raw_fields,
        },
    )
}

const WORDS: &[&str] = &[
    "server", "remote", "attacker", "memory", "request", "header", "module", "version", "update", "patch",
    "vulnerability", "allows", "disclosure", "configuration", "service", "response", "apache", "input",
    "validation", "buffer", "script", "session", "token", "crafted", "affected", "installed", "release",
];

fn body_line<R: Rng>(rng: &mut R) -> String {
    if rng.random_bool(0.04) {
        let score = rng.random_range(0..=100) as f64 / 10.0;
        return format!("Threat: High (CVSS: {score:.1})");
    }
    let n = rng.random_range(4..16);
    let mut words: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect();
    if rng.random_bool(0.02) {
        let at = rng.random_range(0..words.len());
        words.insert(at, "CVSS:");
    }
    words.join(" ")
}

/// An OpenVAS-style report with a short preamble and records of exactly
/// the given char sizes.
pub fn chunk_fixture<R: Rng>(rng: &mut R, sizes: &[usize]) -> String {
    let mut text = String::from("Scan Report\nGenerated for testing\n\n");
    for (i, &size) in sizes.iter().enumerate() {
        let mut rec = format!("NVT: Finding {i} in {}\n", WORDS.choose(rng).unwrap());
        while rec.chars().count() < size {
            rec.push_str(&body_line(rng));
            rec.push('\n');
        }
        let mut rec: String = rec.chars().take(size - 1).collect();
        rec.push('\n');
        text.push_str(&rec);
    }
    text
}
