#ifndef SEEDDISTILL_H
#define SEEDDISTILL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SD_OK 0

// A required pointer argument was null or a string was not UTF-8.
#define SD_ERR_ARGUMENT 1

#define SD_ERR_PARAMETER 2

#define SD_ERR_IO 3

#define SD_ERR_PARSE 4

// Duplicate ids, empty corpus or a seed without usable data.
#define SD_ERR_CORPUS 5

#define SD_ERR_MISSING_REPRESENTATION 6

#define SD_ERR_VALIDATION 7

#define SD_ERR_PANIC 8

// A loaded, validated corpus.
typedef struct SdCorpus SdCorpus;

// A selection order; ids are kept as C strings for `sd_order_id_at`.
typedef struct SdOrder SdOrder;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *sd_version(void);

// Message for the last failed call on this thread, or NULL. Valid until the
// next `sd_*` call on the same thread.
const char *sd_last_error_message(void);

// # Safety
// `s` must be NULL or a string returned by this library, freed once.
void sd_string_free(char *s);

// Loads and validates a corpus manifest.
//
// # Safety
// `manifest_path` must be a NUL-terminated string; `out` a writable pointer.
int32_t sd_corpus_load(const char *manifest_path, struct SdCorpus **out);

// Number of seeds, or 0 for NULL.
//
// # Safety
// `corpus` must be NULL or a live handle.
size_t sd_corpus_len(const struct SdCorpus *corpus);

// # Safety
// `corpus` must be NULL or a handle from `sd_corpus_load`, freed once.
void sd_corpus_free(struct SdCorpus *corpus);

// Orders the corpus. `method` is one of fiss, ciss-p, ciss-m, piss, random;
// `kind` (ts, ast3gram, cfg3gram, embedding) is required for fiss and must
// be NULL otherwise.
//
// # Safety
// `corpus` must be a live handle, `method` a NUL-terminated string, `kind`
// NULL or a NUL-terminated string, and `out` a writable pointer.
int32_t sd_select(const struct SdCorpus *corpus,
                  const char *method,
                  const char *kind,
                  uint64_t rng_seed,
                  struct SdOrder **out);

// # Safety
// `order` must be NULL or a live handle.
size_t sd_order_len(const struct SdOrder *order);

// Seed id at rank `index`, borrowed from the handle; NULL when out of range.
//
// # Safety
// `order` must be NULL or a live handle.
const char *sd_order_id_at(const struct SdOrder *order, size_t index);

// # Safety
// `order` must be NULL or a handle from `sd_select`, freed once.
void sd_order_free(struct SdOrder *order);

// The order file contents (JSON). Free `*out` with `sd_string_free`.
//
// # Safety
// `order` must be a live handle and `out` a writable pointer.
int32_t sd_order_to_json(const struct SdOrder *order, char **out);

// Writes the order file atomically.
//
// # Safety
// `order` must be a live handle and `path` a NUL-terminated string.
int32_t sd_order_save(const struct SdOrder *order, const char *path);

// Writes the budget-`k` prefix of `order` as a manifest at `out_path`.
// `kept` (may be NULL) receives the number of seeds written.
//
// # Safety
// Handles must be live, `out_path` a NUL-terminated string, `kept` NULL or
// writable.
int32_t sd_save_subset(const struct SdCorpus *corpus,
                       const struct SdOrder *order,
                       double budget,
                       const char *out_path,
                       size_t *kept);

// floor(k * n) clamped to at least 1, for k in (0, 1].
//
// # Safety
// `out` must be writable.
int32_t sd_budget_size(size_t n, double budget, size_t *out);

// Mean of `len` run counts over `repetitions` runs.
//
// # Safety
// `counts` must point to `len` values (may be NULL when `len` is 0); `out`
// must be writable.
int32_t sd_average_runs(const uint64_t *counts, size_t len, size_t repetitions, double *out);

// Dedup key of a crash message. Free `*out` with `sd_string_free`.
//
// # Safety
// `message` must be a NUL-terminated string and `out` writable.
int32_t sd_normalize_message(const char *message, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEEDDISTILL_H */
