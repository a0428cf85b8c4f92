//! C ABI for vulnx.
//!
//! Every fallible call returns a [`VulnxStatus`]; on failure the message is
//! available from [`vulnx_last_error`] on the same thread until the next
//! failing call. Datasets and reports are opaque handles released with their
//! `_free` function. Strings returned through out-parameters are owned by the
//! caller and released with [`vulnx_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use vulnx::dataset::Dataset;
use vulnx::evaluation::{classify_similarity, evaluate, rouge_l, Bucket, EvalConfig, EvalReport};
use vulnx::ingest::{detect_scanner, normalize_text, RawReport};
use vulnx::pipeline::{run_extract, PipelineError, RunConfig, ScannerChoice};
use vulnx::schema::to_canonical_string;
use vulnx::ScannerKind;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VulnxStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    UnknownScanner = 5,
    Pipeline = 6,
    Evaluation = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VulnxScanner {
    Unknown = 0,
    Openvas = 1,
    TenableWas = 2,
}

impl From<ScannerKind> for VulnxScanner {
    fn from(k: ScannerKind) -> Self {
        match k {
            ScannerKind::OpenVas => VulnxScanner::Openvas,
            ScannerKind::TenableWas => VulnxScanner::TenableWas,
            ScannerKind::Unknown => VulnxScanner::Unknown,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VulnxBucket {
    Divergent = 0,
    Slightly = 1,
    Moderately = 2,
    Highly = 3,
}

impl From<Bucket> for VulnxBucket {
    fn from(b: Bucket) -> Self {
        match b {
            Bucket::Divergent => VulnxBucket::Divergent,
            Bucket::Slightly => VulnxBucket::Slightly,
            Bucket::Moderately => VulnxBucket::Moderately,
            Bucket::Highly => VulnxBucket::Highly,
        }
    }
}

impl From<VulnxBucket> for Bucket {
    fn from(b: VulnxBucket) -> Self {
        match b {
            VulnxBucket::Divergent => Bucket::Divergent,
            VulnxBucket::Slightly => Bucket::Slightly,
            VulnxBucket::Moderately => Bucket::Moderately,
            VulnxBucket::Highly => Bucket::Highly,
        }
    }
}

/// Opaque dataset handle.
pub struct VulnxDataset {
    inner: Dataset,
}

/// Opaque evaluation report handle.
pub struct VulnxEvalReport {
    inner: EvalReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type Failure = (VulnxStatus, String);

/// Runs `f`, recording its error message and turning panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VulnxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VulnxStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VulnxStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((VulnxStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (VulnxStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| (VulnxStatus::NullArgument, format!("{name} is null")))
}

fn out_arg<T>(p: *mut T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err((VulnxStatus::NullArgument, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', "\u{fffd}")).expect("NULs replaced").into_raw()
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn vulnx_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vulnx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn vulnx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the rule-based extraction pipeline on a `.txt` or `.pdf` report.
/// `scanner` of `Unknown` means detect automatically.
///
/// # Safety
/// `input_path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vulnx_extract_file(
    input_path: *const c_char,
    scanner: VulnxScanner,
    out: *mut *mut VulnxDataset,
) -> VulnxStatus {
    guard(|| {
        out_arg(out, "out")?;
        let input = str_arg(input_path, "input_path")?;
        let mut cfg = RunConfig::new(input, "");
        cfg.scanner = match scanner {
            VulnxScanner::Unknown => ScannerChoice::Auto,
            VulnxScanner::Openvas => ScannerChoice::Openvas,
            VulnxScanner::TenableWas => ScannerChoice::Tenable,
        };
        let outcome = run_extract(&cfg).map_err(|e| {
            let status = match &e {
                PipelineError::Ingest(_) => VulnxStatus::Io,
                PipelineError::UnknownScanner => VulnxStatus::UnknownScanner,
                _ => VulnxStatus::Pipeline,
            };
            (status, e.to_string())
        })?;
        *out = Box::into_raw(Box::new(VulnxDataset {
            inner: outcome.dataset,
        }));
        Ok(())
    })
}

/// Parses a dataset document or a bare JSON array of records.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vulnx_dataset_from_json(json: *const c_char, out: *mut *mut VulnxDataset) -> VulnxStatus {
    guard(|| {
        out_arg(out, "out")?;
        let text = str_arg(json, "json")?;
        let inner = Dataset::parse(text).map_err(|e| (VulnxStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(VulnxDataset { inner }));
        Ok(())
    })
}

/// Reads a dataset file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vulnx_dataset_read(path: *const c_char, out: *mut *mut VulnxDataset) -> VulnxStatus {
    guard(|| {
        out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        let inner = Dataset::read(Path::new(path)).map_err(|e| {
            let status = match e {
                vulnx::dataset::DatasetError::Parse { .. } => VulnxStatus::Parse,
                _ => VulnxStatus::Io,
            };
            (status, e.to_string())
        })?;
        *out = Box::into_raw(Box::new(VulnxDataset { inner }));
        Ok(())
    })
}

/// Canonical JSON text of the dataset.
///
/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vulnx_dataset_to_json(dataset: *const VulnxDataset, out: *mut *mut c_char) -> VulnxStatus {
    guard(|| {
        out_arg(out, "out")?;
        let ds = ref_arg(dataset, "dataset")?;
        *out = into_c_string(ds.inner.to_canonical());
        Ok(())
    })
}

/// Number of records; 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vulnx_dataset_len(dataset: *const VulnxDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.records.len())
}

/// Number of chunks that produced no records; 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vulnx_dataset_gap_count(dataset: *const VulnxDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.gaps.len())
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vulnx_dataset_free(dataset: *mut VulnxDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Scores `extracted` against `baseline` with the default configuration.
///
/// # Safety
/// Both datasets must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vulnx_evaluate(
    extracted: *const VulnxDataset,
    baseline: *const VulnxDataset,
    out: *mut *mut VulnxEvalReport,
) -> VulnxStatus {
    guard(|| {
        out_arg(out, "out")?;
        let ex = ref_arg(extracted, "extracted")?;
        let base = ref_arg(baseline, "baseline")?;
        let inner = evaluate(&ex.inner.records, &base.inner.records, &EvalConfig::default())
            .map_err(|e| (VulnxStatus::Evaluation, e.to_string()))?;
        *out = Box::into_raw(Box::new(VulnxEvalReport { inner }));
        Ok(())
    })
}

/// Mean over all scored fields; NaN for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vulnx_report_overall_mean(report: *const VulnxEvalReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.overall_mean)
}

/// Percentage of scored fields below the highly-similar bucket; NaN for a
/// null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vulnx_report_below_highly_pct(report: *const VulnxEvalReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.below_highly_pct)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vulnx_report_bucket_count(report: *const VulnxEvalReport, bucket: VulnxBucket) -> usize {
    report
        .as_ref()
        .map_or(0, |r| r.inner.bucket_counts.get(&bucket.into()).copied().unwrap_or(0))
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vulnx_report_matched_pairs(report: *const VulnxEvalReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.matched_pairs)
}

/// Canonical JSON text of the report.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vulnx_report_to_json(report: *const VulnxEvalReport, out: *mut *mut c_char) -> VulnxStatus {
    guard(|| {
        out_arg(out, "out")?;
        let r = ref_arg(report, "report")?;
        *out = into_c_string(to_canonical_string(&r.inner));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vulnx_report_free(report: *mut VulnxEvalReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// ROUGE-L F1 of two texts.
///
/// # Safety
/// Both strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vulnx_rouge_l(candidate: *const c_char, reference: *const c_char, out: *mut f64) -> VulnxStatus {
    guard(|| {
        out_arg(out, "out")?;
        let c = str_arg(candidate, "candidate")?;
        let r = str_arg(reference, "reference")?;
        *out = rouge_l(c, r, &EvalConfig::default());
        Ok(())
    })
}

/// Similarity bucket of a score under the default thresholds.
#[no_mangle]
pub extern "C" fn vulnx_classify(score: f64) -> VulnxBucket {
    classify_similarity(score, &EvalConfig::default()).into()
}

/// Scanner that produced a report text; `Unknown` for null or non-UTF-8
/// input.
///
/// # Safety
/// `text` must be null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn vulnx_detect_scanner(text: *const c_char) -> VulnxScanner {
    let Ok(text) = str_arg(text, "text") else {
        return VulnxScanner::Unknown;
    };
    catch_unwind(|| detect_scanner(&normalize_text(&RawReport::from_text("<memory>", text))).into())
        .unwrap_or(VulnxScanner::Unknown)
}
