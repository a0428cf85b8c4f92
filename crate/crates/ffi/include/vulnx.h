#ifndef VULNX_H
#define VULNX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum VulnxStatus {
  VULNX_STATUS_OK = 0,
  VULNX_STATUS_NULL_ARGUMENT = 1,
  VULNX_STATUS_INVALID_UTF8 = 2,
  VULNX_STATUS_IO = 3,
  VULNX_STATUS_PARSE = 4,
  VULNX_STATUS_UNKNOWN_SCANNER = 5,
  VULNX_STATUS_PIPELINE = 6,
  VULNX_STATUS_EVALUATION = 7,
  VULNX_STATUS_PANIC = 99,
} VulnxStatus;

typedef enum VulnxScanner {
  VULNX_SCANNER_UNKNOWN = 0,
  VULNX_SCANNER_OPENVAS = 1,
  VULNX_SCANNER_TENABLE_WAS = 2,
} VulnxScanner;

typedef enum VulnxBucket {
  VULNX_BUCKET_DIVERGENT = 0,
  VULNX_BUCKET_SLIGHTLY = 1,
  VULNX_BUCKET_MODERATELY = 2,
  VULNX_BUCKET_HIGHLY = 3,
} VulnxBucket;

// Opaque dataset handle.
typedef struct VulnxDataset VulnxDataset;

// Opaque evaluation report handle.
typedef struct VulnxEvalReport VulnxEvalReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, statically allocated.
const char *vulnx_version(void);

// Message of the last failure on this thread, or null. Valid until the
// next failing call on the same thread.
const char *vulnx_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void vulnx_string_free(char *s);

// Runs the rule-based extraction pipeline on a `.txt` or `.pdf` report.
// `scanner` of `Unknown` means detect automatically.
//
// # Safety
// `input_path` must be a NUL-terminated string; `out` must be writable.
enum VulnxStatus vulnx_extract_file(const char *input_path,
                                    enum VulnxScanner scanner,
                                    struct VulnxDataset **out);

// Parses a dataset document or a bare JSON array of records.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum VulnxStatus vulnx_dataset_from_json(const char *json, struct VulnxDataset **out);

// Reads a dataset file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum VulnxStatus vulnx_dataset_read(const char *path, struct VulnxDataset **out);

// Canonical JSON text of the dataset.
//
// # Safety
// `dataset` must be a live handle; `out` must be writable.
enum VulnxStatus vulnx_dataset_to_json(const struct VulnxDataset *dataset, char **out);

// Number of records; 0 for a null handle.
//
// # Safety
// `dataset` must be null or a live handle.
size_t vulnx_dataset_len(const struct VulnxDataset *dataset);

// Number of chunks that produced no records; 0 for a null handle.
//
// # Safety
// `dataset` must be null or a live handle.
size_t vulnx_dataset_gap_count(const struct VulnxDataset *dataset);

// # Safety
// `dataset` must be null or a handle not yet freed.
void vulnx_dataset_free(struct VulnxDataset *dataset);

// Scores `extracted` against `baseline` with the default configuration.
//
// # Safety
// Both datasets must be live handles; `out` must be writable.
enum VulnxStatus vulnx_evaluate(const struct VulnxDataset *extracted,
                                const struct VulnxDataset *baseline,
                                struct VulnxEvalReport **out);

// Mean over all scored fields; NaN for a null handle.
//
// # Safety
// `report` must be null or a live handle.
double vulnx_report_overall_mean(const struct VulnxEvalReport *report);

// Percentage of scored fields below the highly-similar bucket; NaN for a
// null handle.
//
// # Safety
// `report` must be null or a live handle.
double vulnx_report_below_highly_pct(const struct VulnxEvalReport *report);

// # Safety
// `report` must be null or a live handle.
size_t vulnx_report_bucket_count(const struct VulnxEvalReport *report, enum VulnxBucket bucket);

// # Safety
// `report` must be null or a live handle.
size_t vulnx_report_matched_pairs(const struct VulnxEvalReport *report);

// Canonical JSON text of the report.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum VulnxStatus vulnx_report_to_json(const struct VulnxEvalReport *report, char **out);

// # Safety
// `report` must be null or a handle not yet freed.
void vulnx_report_free(struct VulnxEvalReport *report);

// ROUGE-L F1 of two texts.
//
// # Safety
// Both strings must be NUL-terminated; `out` must be writable.
enum VulnxStatus vulnx_rouge_l(const char *candidate, const char *reference, double *out);

// Similarity bucket of a score under the default thresholds.
enum VulnxBucket vulnx_classify(double score);

// Scanner that produced a report text; `Unknown` for null or non-UTF-8
// input.
//
// # Safety
// `text` must be null or NUL-terminated.
enum VulnxScanner vulnx_detect_scanner(const char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VULNX_H */
