//! Command-line front end. Exit codes: 0 success, 1 fatal error, 2 partial
//! success (some chunks failed and the dataset lists the gaps).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chunking::{write_debug_dump, ChunkConfig};
use crate::dataset::Dataset;
use crate::evaluation::{evaluate, write_scores_csv, Bucket, EvalConfig};
use crate::extraction::{ProviderConfig, ProviderKind, API_KEY_ENV};
use crate::ingest::{detect_scanner, normalize_text, read_report, ScannerKind};
use crate::pipeline::{prepare, run_extract, PipelineError, RunConfig, ScannerChoice};
use crate::schema::to_canonical_string;
use crate::synth::{generate, SynthConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vulnx", version, about = "Normalize vulnerability scanner reports into a unified dataset")]
pub struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract a dataset from a report.
    Extract(ExtractArgs),
    /// Score a dataset against a baseline.
    Eval(EvalArgs),
    /// Write the chunks a report would be split into.
    Chunk(ChunkArgs),
    /// Print which scanner produced a report.
    Detect(DetectArgs),
    /// Write a synthetic report and its baseline.
    GenFixture(GenFixtureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScannerArg {
    Auto,
    Openvas,
    Tenable,
}

impl From<ScannerArg> for ScannerChoice {
    fn from(s: ScannerArg) -> Self {
        match s {
            ScannerArg::Auto => ScannerChoice::Auto,
            ScannerArg::Openvas => ScannerChoice::Openvas,
            ScannerArg::Tenable => ScannerChoice::Tenable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderArg {
    Rule,
    Mock,
    Http,
}

#[derive(Debug, Clone, Args)]
pub struct ChunkingArgs {
    #[arg(long, default_value_t = 9000)]
    pub target_chars: usize,
    #[arg(long, default_value_t = 12000)]
    pub hard_max_chars: usize,
    #[arg(long, default_value_t = 500)]
    pub overlap_chars: usize,
}

impl ChunkingArgs {
    fn config(&self) -> ChunkConfig {
        ChunkConfig {
            target_chars: self.target_chars,
            hard_max_chars: self.hard_max_chars,
            overlap_chars: self.overlap_chars,
            ..ChunkConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = ScannerArg::Auto)]
    pub scanner: ScannerArg,
    #[arg(long, value_enum, default_value_t = ProviderArg::Rule)]
    pub provider: ProviderArg,
    /// Model identifier sent to the provider (required for http).
    #[arg(long)]
    pub model_name: Option<String>,
    #[arg(long, default_value_t = 0.2)]
    pub temperature: f64,
    #[command(flatten)]
    pub chunking: ChunkingArgs,
    /// Prompt template file with {chunk_text}, {scanner} and {field_instructions}.
    #[arg(long)]
    pub prompt_template: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub parallelism: usize,
    /// Recorded in the run metadata.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Chat-completions API base URL; VULNX_API_BASE overrides it.
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long, default_value_t = 120)]
    pub timeout_seconds: u64,
    #[arg(long, default_value_t = 3)]
    pub max_retries: u32,
    /// JSON file of scripted replies for the mock provider.
    #[arg(long)]
    pub mock_script: Option<PathBuf>,
    /// Also write the records as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub extracted: PathBuf,
    #[arg(long)]
    pub baseline: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ChunkArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub dump_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ScannerArg::Auto)]
    pub scanner: ScannerArg,
    #[command(flatten)]
    pub chunking: ChunkingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenFixtureArgs {
    /// Directory receiving report.txt and baseline.json.
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ScannerArg::Openvas)]
    pub scanner: ScannerArg,
    #[arg(long, default_value_t = 34)]
    pub records: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

fn fatal(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_FATAL
}

fn provider_config(a: &ExtractArgs) -> Result<ProviderConfig, String> {
    let kind = match a.provider {
        ProviderArg::Rule => ProviderKind::Rule,
        ProviderArg::Mock => ProviderKind::Mock,
        ProviderArg::Http => ProviderKind::Http,
    };
    let model_name = match (&a.model_name, kind) {
        (Some(m), _) => m.clone(),
        (None, ProviderKind::Rule) => "rule-extractor".into(),
        (None, ProviderKind::Mock) => "mock".into(),
        (None, ProviderKind::Http) => return Err("--model-name is required with --provider http".into()),
    };
    if kind == ProviderKind::Mock && a.mock_script.is_none() {
        return Err("--mock-script is required with --provider mock".into());
    }
    Ok(ProviderConfig {
        kind,
        model_name,
        temperature: a.temperature,
        max_retries: a.max_retries,
        timeout_seconds: a.timeout_seconds,
        endpoint: a.endpoint.clone(),
        api_key_env: API_KEY_ENV.into(),
        mock_script: a.mock_script.clone(),
    }
    .with_env_endpoint())
}

pub fn cmd_extract(a: &ExtractArgs) -> i32 {
    let provider = match provider_config(a) {
        Ok(p) => p,
        Err(e) => return fatal(e),
    };
    let cfg = RunConfig {
        input_path: a.input.clone(),
        scanner: a.scanner.into(),
        provider,
        chunking: a.chunking.config(),
        prompt_template: a.prompt_template.clone(),
        output_path: a.output.clone(),
        parallelism: a.parallelism,
        seed: a.seed,
    };
    let outcome = match run_extract(&cfg) {
        Ok(o) => o,
        Err(PipelineError::AllChunksFailed(failures)) => {
            for f in &failures {
                eprintln!("  {f}");
            }
            return fatal(format!("all {} chunk(s) failed; no dataset written", failures.len()));
        }
        Err(e) => return fatal(e),
    };
    if let Err(e) = outcome.dataset.write(&a.output) {
        return fatal(e);
    }
    if let Some(csv_path) = &a.csv {
        let written = fs::File::create(csv_path)
            .map_err(|e| e.to_string())
            .and_then(|f| crate::schema::write_records_csv(&outcome.dataset.records, f).map_err(|e| e.to_string()));
        if let Err(e) = written {
            return fatal(format!("cannot write {}: {e}", csv_path.display()));
        }
    }
    println!(
        "wrote {} record(s) to {} ({} chunk(s), {} failed, {} duplicate(s) dropped, {} invalid)",
        outcome.dataset.records.len(),
        a.output.display(),
        outcome.chunk_report.chunk_count,
        outcome.failures.len(),
        outcome.dataset.metadata.as_ref().map_or(0, |m| m.counts.dropped_duplicates),
        outcome.dataset.invalid_records.len(),
    );
    if outcome.is_partial() {
        for f in &outcome.failures {
            eprintln!("warning: {f}");
        }
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    }
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn cmd_eval(a: &EvalArgs) -> i32 {
    let extracted = match Dataset::read(&a.extracted) {
        Ok(d) => d,
        Err(e) => return fatal(e),
    };
    let baseline = match Dataset::read(&a.baseline) {
        Ok(d) => d,
        Err(e) => return fatal(e),
    };
    let cfg = EvalConfig {
        beta: a.beta,
        ..EvalConfig::default()
    };
    let report = match evaluate(&extracted.records, &baseline.records, &cfg) {
        Ok(r) => r,
        Err(e) => return fatal(e),
    };
    if let Err(e) = write_text(&a.report, &to_canonical_string(&report)) {
        return fatal(e);
    }
    if let Some(csv_path) = &a.csv {
        let mut buf = Vec::new();
        if let Err(e) = write_scores_csv(&report, &mut buf) {
            return fatal(e);
        }
        if let Err(e) = write_text(csv_path, &String::from_utf8_lossy(&buf)) {
            return fatal(e);
        }
    }
    println!("overall_mean: {:.6}", report.overall_mean);
    println!("below_highly_pct: {:.4}", report.below_highly_pct);
    for b in Bucket::ALL {
        println!("{}: {}", b.as_str(), report.bucket_counts[&b]);
    }
    EXIT_OK
}

pub fn cmd_chunk(a: &ChunkArgs) -> i32 {
    let cfg = a.chunking.config();
    let prepared = match prepare(&a.input, a.scanner.into(), &cfg) {
        Ok(p) => p,
        Err(e) => return fatal(e),
    };
    if let Err(e) = write_debug_dump(&a.dump_dir, &prepared.chunks, &prepared.report, &cfg) {
        return fatal(format!("cannot write {}: {e}", a.dump_dir.display()));
    }
    println!("scanner: {}", prepared.kind);
    println!("chunks: {}", prepared.report.chunk_count);
    println!("mean_chunk_chars: {:.1}", prepared.report.mean_chunk_chars);
    println!("coverage_complete: {}", prepared.report.coverage_complete);
    if prepared.report.coverage_complete {
        EXIT_OK
    } else {
        fatal("chunk coverage is incomplete; see manifest.json")
    }
}

pub fn cmd_detect(a: &DetectArgs) -> i32 {
    match read_report(&a.input, None) {
        Ok(raw) => {
            let kind = detect_scanner(&normalize_text(&raw));
            println!("{kind}");
            if kind == ScannerKind::Unknown {
                EXIT_FATAL
            } else {
                EXIT_OK
            }
        }
        Err(e) => fatal(e),
    }
}

pub fn cmd_gen_fixture(a: &GenFixtureArgs) -> i32 {
    let kind = match a.scanner {
        ScannerArg::Tenable => ScannerKind::TenableWas,
        _ => ScannerKind::OpenVas,
    };
    let report = generate(&SynthConfig {
        kind,
        records: a.records,
        seed: a.seed,
        ..SynthConfig::default()
    });
    let report_path = a.output_dir.join("report.txt");
    let baseline_path = a.output_dir.join("baseline.json");
    if let Err(e) = write_text(&report_path, &report.text) {
        return fatal(e);
    }
    if let Err(e) = Dataset::from_records(report.baseline).write(&baseline_path) {
        return fatal(e);
    }
    println!("{}\n{}", report_path.display(), baseline_path.display());
    EXIT_OK
}

pub fn run(cli: Cli) -> i32 {
    match &cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Chunk(a) => cmd_chunk(a),
        Command::Detect(a) => cmd_detect(a),
        Command::GenFixture(a) => cmd_gen_fixture(a),
    }
}
