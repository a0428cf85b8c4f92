//! Deterministic synthetic scanner reports with their ground-truth records.
//!
//! The generated text follows the section layout of real OpenVAS and Tenable
//! WAS text exports, including running page headers, so the whole pipeline
//! can be exercised and scored without proprietary reports.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::ScannerKind;
use crate::schema::{CvssVersion, SeverityLabel, UnifiedVulnerability};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub kind: ScannerKind,
    pub records: usize,
    pub seed: u64,
    /// Inclusive range for the rendered size of each record, in chars.
    pub min_record_chars: usize,
    pub max_record_chars: usize,
    /// Insert a running page header every this many lines.
    pub page_lines: Option<usize>,
    /// Chance of leaving out each optional section.
    pub omit_probability: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            kind: ScannerKind::OpenVas,
            records: 34,
            seed: 7,
            min_record_chars: 2000,
            max_record_chars: 2800,
            page_lines: Some(55),
            omit_probability: 0.15,
        }
    }
}

/// Report text plus the records an analyst would transcribe from it.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthReport {
    pub text: String,
    pub baseline: Vec<UnifiedVulnerability>,
    /// Char length of each rendered record, before page headers.
    pub record_chars: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LocationStyle {
    HostPortLines,
    Url,
}

#[derive(Debug, Clone)]
struct Finding {
    id_number: u32,
    name: String,
    product: String,
    cves: Vec<String>,
    cwes: Vec<String>,
    urls: Vec<String>,
    summary: Vec<String>,
    insight: Option<Vec<String>>,
    impact: Option<String>,
    solution: Option<String>,
    versions: Option<(String, String)>,
    severity: SeverityLabel,
    score: f64,
    family: String,
    detection: Option<String>,
    host: String,
    port: String,
    style: LocationStyle,
}

const PRODUCTS: &[&str] = &[
    "Apache HTTP Server",
    "nginx",
    "OpenSSH",
    "PHP",
    "jQuery",
    "Apache Tomcat",
    "OpenSSL",
    "ProFTPD",
    "Samba",
    "MySQL",
    "PostgreSQL",
    "Exim",
    "Dovecot",
    "lighttpd",
    "WordPress",
    "Drupal",
    "Joomla!",
    "Microsoft IIS",
    "Oracle WebLogic Server",
    "Elasticsearch",
];

const ISSUES: &[&str] = &[
    "Remote Code Execution",
    "Denial of Service",
    "Information Disclosure",
    "Cross-Site Scripting",
    "SQL Injection",
    "Directory Traversal",
    "Authentication Bypass",
    "Privilege Escalation",
    "Memory Corruption",
    "Open Redirect",
    "Request Smuggling",
    "Weak Cipher Suites",
];

const FAMILIES: &[&str] = &[
    "Web Servers",
    "Web application abuses",
    "General",
    "Denial of Service",
    "Databases",
    "SSL and TLS",
    "FTP",
    "Product detection",
];

const SUBJECTS: &[&str] = &[
    "The affected service",
    "A remote attacker",
    "The web application",
    "This component",
    "An unauthenticated user",
    "The installed package",
    "A local user",
    "The request handler",
    "The default configuration",
    "The vulnerable module",
];

const VERBS: &[&str] = &[
    "may disclose",
    "fails to validate",
    "does not properly restrict",
    "can trigger",
    "allows access to",
    "mishandles",
    "exposes",
    "incorrectly parses",
    "can overwrite",
    "leaks",
];

const OBJECTS: &[&str] = &[
    "sensitive memory contents",
    "crafted HTTP requests",
    "session tokens",
    "configuration files",
    "directory listings",
    "arbitrary script code",
    "authentication headers",
    "uploaded archives",
    "database credentials",
    "cached responses",
    "internal error messages",
    "user supplied input",
];

const TAILS: &[&str] = &[
    "under default settings",
    "when the module is enabled",
    "in certain configurations",
    "via a specially crafted request",
    "on affected versions",
    "during connection setup",
    "after a failed login attempt",
    "while processing large payloads",
    "if debug logging is active",
    "without any user interaction",
];

fn sentence(rng: &mut ChaCha8Rng) -> String {
    format!(
        "{} {} {} {}.",
        SUBJECTS.choose(rng).unwrap(),
        VERBS.choose(rng).unwrap(),
        OBJECTS.choose(rng).unwrap(),
        TAILS.choose(rng).unwrap()
    )
}

/// Greedy word wrap at `width` columns.
fn wrap(text: &str, width: usize) -> String {
    let mut lines: Vec<String> = Vec::new();
    let mut cur = String::new();
    for word in text.split_whitespace() {
        if !cur.is_empty() && cur.len() + 1 + word.len() > width {
            lines.push(std::mem::take(&mut cur));
        }
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(word);
    }
    if !cur.is_empty() {
        lines.push(cur);
    }
    lines.join("\n")
}

fn paragraph(sentences: &[String]) -> String {
    wrap(&sentences.join(" "), 76)
}

fn severity_for(score: f64) -> SeverityLabel {
    match score {
        s if s >= 9.0 => SeverityLabel::Critical,
        s if s >= 7.0 => SeverityLabel::High,
        s if s >= 4.0 => SeverityLabel::Medium,
        _ => SeverityLabel::Low,
    }
}

fn title(s: &SeverityLabel) -> String {
    let l = s.as_str();
    let mut c = l.chars();
    c.next().map(|f| f.to_ascii_uppercase().to_string() + c.as_str()).unwrap_or_default()
}

fn version(rng: &mut ChaCha8Rng) -> (String, String) {
    let major = rng.random_range(1..10);
    let minor = rng.random_range(0..20);
    let patch = rng.random_range(0..40);
    let fixed_patch = patch + rng.random_range(1..12);
    (
        format!("{major}.{minor}.{patch}"),
        format!("{major}.{minor}.{fixed_patch}"),
    )
}

/// The OptionsBleed finding as both scanners report it.
fn optionsbleed(kind: ScannerKind) -> Finding {
    let tenable = kind == ScannerKind::TenableWas;
    Finding {
        id_number: if tenable { 98913 } else { 812033 },
        name: if tenable {
            "Apache 2.4.x < 2.4.28 HTTP Vulnerability (OptionsBleed)".into()
        } else {
            "Apache HTTP Server OPTIONS Memory Leak Vulnerability (OptionsBleed)".into()
        },
        product: "Apache HTTP Server".into(),
        cves: vec!["CVE-2017-9798".into()],
        cwes: vec!["CWE-416".into()],
        urls: if tenable {
            vec!["https://httpd.apache.org/security/vulnerabilities_24.html#2.4.28".into()]
        } else {
            vec!["http://openwall.com/lists/oss-security/2017/09/18/2".into()]
        },
        summary: vec![if tenable {
            "Versions of Apache 2.4.x prior to 2.4.28 are affected by a vulnerability that allows remote \
             attackers to read secret data from process memory."
                .into()
        } else {
            "Apache HTTP Server allows remote attackers to read data from process memory if the Limit \
             directive can be set in a user's .htaccess file, or if httpd.conf has certain misconfigurations, \
             aka Optionsbleed."
                .into()
        }],
        insight: Some(vec![
            "The flaw exists because of a use-after-free when an unrecognized method is given in a Limit \
             directive inside an .htaccess file."
                .into(),
        ]),
        impact: Some("Allows unauthorized reading of memory blocks from the server.".into()),
        solution: Some("Update to Apache HTTP Server 2.4.28 or later.".into()),
        versions: if tenable {
            None
        } else {
            Some(("2.2.8".into(), "2.4.28".into()))
        },
        severity: if tenable {
            SeverityLabel::High
        } else {
            SeverityLabel::Medium
        },
        score: if tenable { 7.5 } else { 5.0 },
        family: "Web Servers".into(),
        detection: Some(if tenable {
            "Plugin ID 98913\nType: remote".into()
        } else {
            "Apache Web Server Detection (OID: 1.3.6.1.4.1.25623.1.0.900498)".into()
        }),
        host: "192.168.56.101".into(),
        port: if tenable { "443".into() } else { "80/tcp".into() },
        style: LocationStyle::HostPortLines,
    }
}

fn random_finding(rng: &mut ChaCha8Rng, kind: ScannerKind, i: usize, names: &mut HashSet<String>, omit: f64) -> Finding {
    let tenable = kind == ScannerKind::TenableWas;
    let (product, name) = loop {
        let product = *PRODUCTS.choose(rng).unwrap();
        let issue = *ISSUES.choose(rng).unwrap();
        let (_, fixed) = version(rng);
        let name = if tenable {
            format!("{product} < {fixed} {issue}")
        } else {
            format!("{product} {issue} Vulnerability ({fixed})")
        };
        if names.insert(name.to_lowercase()) {
            break (product.to_string(), name);
        }
    };
    let keep = |rng: &mut ChaCha8Rng| !rng.random_bool(omit);
    let id_number = if tenable {
        rng.random_range(10000..999999)
    } else {
        rng.random_range(100000..999999)
    };
    let tenths: u32 = rng.random_range(10..=100);
    let score = f64::from(tenths) / 10.0;
    let cve_count = rng.random_range(0..=3);
    let cves = (0..cve_count)
        .map(|_| format!("CVE-{}-{}", rng.random_range(2008..2025), rng.random_range(1000..50000)))
        .collect::<Vec<_>>();
    let mut seen = HashSet::new();
    let cves = cves.into_iter().filter(|c| seen.insert(c.clone())).collect();
    let cwes = if rng.random_bool(0.5) {
        vec![format!("CWE-{}", rng.random_range(20..1000))]
    } else {
        Vec::new()
    };
    let urls = (0..rng.random_range(1..=3))
        .map(|k| format!("https://advisories.example.org/{}/{}-{k}", product.to_lowercase().replace([' ', '!'], "-"), i))
        .collect();
    let versions = keep(rng).then(|| version(rng));
    let solution = keep(rng).then(|| match &versions {
        Some((_, fixed)) => format!("Update to {product} {fixed} or later. {}", sentence(rng)),
        None => format!("Apply the vendor supplied patch. {}", sentence(rng)),
    });
    let host = if rng.random_bool(0.5) {
        format!("192.168.{}.{}", rng.random_range(0..255), rng.random_range(1..255))
    } else {
        format!("app{}.corp.example", rng.random_range(1..99))
    };
    let port_number = *[80u16, 443, 8080, 8443, 21, 22, 3306].choose(rng).unwrap();
    Finding {
        id_number,
        name,
        product,
        cves,
        cwes,
        urls,
        summary: vec![sentence(rng), sentence(rng)],
        insight: keep(rng).then(|| vec![sentence(rng)]),
        impact: keep(rng).then(|| paragraph(&[sentence(rng), sentence(rng)])),
        solution: solution.map(|s| paragraph(&[s])),
        versions: if tenable { None } else { versions },
        severity: severity_for(score),
        score,
        family: FAMILIES.choose(rng).unwrap().to_string(),
        detection: keep(rng).then(|| {
            if tenable {
                format!("Plugin ID {id_number}\nType: remote")
            } else {
                paragraph(&[sentence(rng)])
            }
        }),
        host,
        port: if tenable {
            port_number.to_string()
        } else {
            format!("{port_number}/tcp")
        },
        style: if rng.random_bool(0.5) {
            LocationStyle::HostPortLines
        } else {
            LocationStyle::Url
        },
    }
}

fn push_section(out: &mut String, label: &str, body: &str) {
    out.push('\n');
    out.push_str(label);
    out.push('\n');
    out.push_str(body);
    out.push('\n');
}

fn render_openvas(s: &Finding) -> String {
    let mut out = format!(
        "NVT: {}\nOID: 1.3.6.1.4.1.25623.1.0.{}\nThreat: {} (CVSS: {:.1})\nFamily: {}\n",
        s.name,
        s.id_number,
        title(&s.severity),
        s.score,
        s.family
    );
    push_section(&mut out, "Summary", &paragraph(&s.summary));
    let location = match s.style {
        LocationStyle::HostPortLines => format!(
            "Host: {}\nPort: {}\nThe service answered a probe for the affected resource.",
            s.host, s.port
        ),
        LocationStyle::Url => format!("Installation path / port: {}\nURL: http://{}/", s.port, s.host),
    };
    push_section(&mut out, "Vulnerability Detection Result", &location);
    if let Some(impact) = &s.impact {
        push_section(&mut out, "Impact", impact);
    }
    if let Some(solution) = &s.solution {
        push_section(&mut out, "Solution", solution);
    }
    if let Some((installed, fixed)) = &s.versions {
        push_section(
            &mut out,
            "Affected Software/OS",
            &format!(
                "{} versions prior to {fixed}.\nInstalled version: {installed}\nFixed version: {fixed}",
                s.product
            ),
        );
    }
    if let Some(insight) = &s.insight {
        push_section(&mut out, "Vulnerability Insight", &paragraph(insight));
    }
    if let Some(detection) = &s.detection {
        push_section(&mut out, "Vulnerability Detection Method", detection);
    }
    push_section(
        &mut out,
        "Log Method",
        &format!("Details: {}\nOID: 1.3.6.1.4.1.25623.1.0.{}", s.name, s.id_number),
    );
    push_section(&mut out, "References", &reference_lines(s));
    out
}

fn reference_lines(s: &Finding) -> String {
    let mut lines: Vec<String> = s.cves.iter().map(|c| format!("CVE: {c}")).collect();
    lines.extend(s.cwes.iter().map(|c| format!("CWE: {c}")));
    lines.extend(s.urls.iter().map(|u| format!("URL: {u}")));
    lines.join("\n")
}

fn render_tenable(s: &Finding) -> String {
    let mut out = format!(
        "{} - {}\nSeverity: {}\nPlugin ID: {}\nFamily: {}\n",
        s.id_number,
        s.name,
        title(&s.severity),
        s.id_number,
        s.family
    );
    push_section(&mut out, "Description", &paragraph(&s.summary));
    let location = match s.style {
        LocationStyle::HostPortLines => format!("Host: {}\nPort: {}", s.host, s.port),
        LocationStyle::Url => format!("URL: https://{}:{}/", s.host, s.port),
    };
    push_section(&mut out, "Affected Application", &location);
    if let Some(solution) = &s.solution {
        push_section(&mut out, "Solution", solution);
    }
    push_section(&mut out, "See Also", &s.urls.join("\n"));
    push_section(
        &mut out,
        "Vulnerability Properties",
        &format!("Severity: {}\nExploit available: false", title(&s.severity)),
    );
    push_section(
        &mut out,
        "Discovery",
        "First Discovered: March 1, 2024\nLast Observed: March 8, 2024",
    );
    push_section(
        &mut out,
        "VPR Key Drivers",
        "Threat Recency: No recorded events\nExploit Code Maturity: Unproven",
    );
    if let Some(detection) = &s.detection {
        push_section(&mut out, "Plugin Details", detection);
    }
    push_section(
        &mut out,
        "Risk Information",
        &format!(
            "Risk Factor: {}\nCVSS v3 Base Score: {:.1}\nCVSS v3 Vector: CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:N/A:N",
            title(&s.severity),
            s.score
        ),
    );
    let mut refs: Vec<String> = s.cves.iter().map(|c| format!("CVE: {c}")).collect();
    refs.extend(s.cwes.iter().map(|c| format!("CWE: {c}")));
    if !refs.is_empty() {
        push_section(&mut out, "Reference Information", &refs.join("\n"));
    }
    out
}

fn render(kind: ScannerKind, s: &Finding) -> String {
    match kind {
        ScannerKind::TenableWas => render_tenable(s),
        _ => render_openvas(s),
    }
}

fn baseline_record(kind: ScannerKind, index: usize, s: &Finding) -> UnifiedVulnerability {
    let mut r = UnifiedVulnerability::empty(format!("{kind}-{index}"), kind);
    r.name = Some(s.name.clone());
    r.cves = s.cves.clone();
    r.severity_label = Some(s.severity.clone());
    r.cvss_score = Some(s.score);
    r.family = Some(s.family.clone());
    r.solution = s.solution.clone();
    r.detection_method = s.detection.clone();
    r.host = Some(s.host.clone());
    r.port = Some(s.port.clone());
    match kind {
        ScannerKind::TenableWas => {
            r.description = Some(paragraph(&s.summary));
            r.cvss_version = Some(CvssVersion::V3);
            r.references = s.urls.iter().chain(&s.cwes).cloned().collect();
        }
        _ => {
            let mut description = paragraph(&s.summary);
            if let Some(insight) = &s.insight {
                description.push('\n');
                description.push_str(&paragraph(insight));
            }
            r.description = Some(description);
            r.impact = s.impact.clone();
            if let Some((installed, fixed)) = &s.versions {
                r.installed_version = Some(installed.clone());
                r.fixed_version = Some(fixed.clone());
            }
            r.references = s.cwes.iter().chain(&s.urls).cloned().collect();
        }
    }
    r
}

fn preamble(kind: ScannerKind, records: usize) -> String {
    match kind {
        ScannerKind::TenableWas => format!(
            "Tenable Web App Scanning\nScan Results\nFindings reported: {records}\n\n"
        ),
        _ => format!(
            "OpenVAS Scan Report\nThis document reports on the results of an automatic security scan.\n\
             Findings reported: {records}\n\n"
        ),
    }
}

fn insert_page_headers(text: &str, every: usize) -> String {
    let lines: Vec<&str> = text.lines().collect();
    let pages = lines.len().div_ceil(every).max(1);
    let mut out = String::with_capacity(text.len() + pages * 32);
    for (i, line) in lines.iter().enumerate() {
        if i > 0 && i % every == 0 {
            out.push_str(&format!("Scan Report  Page {} of {pages}\n", i / every + 1));
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Builds a report and its baseline. Identical configs give identical output.
pub fn generate(cfg: &SynthConfig) -> SynthReport {
    let kind = match cfg.kind {
        ScannerKind::Unknown => ScannerKind::OpenVas,
        k => k,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut names = HashSet::new();
    let mut body = String::new();
    let mut baseline = Vec::with_capacity(cfg.records);
    let mut record_chars = Vec::with_capacity(cfg.records);
    let (lo, hi) = (cfg.min_record_chars.min(cfg.max_record_chars), cfg.max_record_chars.max(cfg.min_record_chars));

    for i in 0..cfg.records {
        let mut finding = if i == 0 {
            let s = optionsbleed(kind);
            names.insert(s.name.to_lowercase());
            s
        } else {
            random_finding(&mut rng, kind, i, &mut names, cfg.omit_probability)
        };
        let target = rng.random_range(lo..=hi);
        let mut text = render(kind, &finding);
        let mut toggle = false;
        while text.chars().count() < target {
            match (&mut finding.insight, toggle && kind != ScannerKind::TenableWas) {
                (Some(insight), true) => insight.push(sentence(&mut rng)),
                _ => finding.summary.push(sentence(&mut rng)),
            }
            toggle = !toggle;
            text = render(kind, &finding);
        }
        record_chars.push(text.chars().count());
        baseline.push(baseline_record(kind, i, &finding));
        body.push_str(&text);
        body.push('\n');
    }

    let mut text = preamble(kind, cfg.records);
    text.push_str(&body);
    let text = match cfg.page_lines {
        Some(n) if n > 0 => insert_page_headers(&text, n),
        _ => text,
    };
    SynthReport {
        text,
        baseline,
        record_chars,
    }
}
