#ifndef THREADNET_H
#define THREADNET_H

/* Generated by cbindgen from threadnet-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of connected 3-node motif classes.
 */
#define TN_TRIAD_CLASS_COUNT 13

/**
 * Result codes returned by every function.
 */
typedef enum {
  TN_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TN_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TN_STATUS_INVALID_UTF8 = 2,
  /**
   * The input file could not be read or an output could not be written.
   */
  TN_STATUS_IO = 3,
  /**
   * A corpus line could not be parsed.
   */
  TN_STATUS_PARSE = 4,
  /**
   * A corpus invariant was violated in strict mode.
   */
  TN_STATUS_VALIDATION = 5,
  /**
   * The requested thread or user does not exist.
   */
  TN_STATUS_NOT_FOUND = 6,
  /**
   * The corpus or census has nothing to analyze.
   */
  TN_STATUS_EMPTY = 7,
  /**
   * An argument was out of range or otherwise invalid.
   */
  TN_STATUS_INVALID_ARGUMENT = 8,
  /**
   * An internal invariant failed.
   */
  TN_STATUS_INTERNAL = 9,
  /**
   * A panic was caught at the ABI boundary.
   */
  TN_STATUS_PANIC = 10,
} TnStatus;

/**
 * An ingested corpus. Opaque; create with `tn_corpus_open`, release with
 * `tn_corpus_free`.
 */
typedef struct TnCorpus TnCorpus;

/**
 * Corpus cardinalities.
 */
typedef struct {
  uint64_t films;
  uint64_t threads;
  uint64_t posts;
  uint64_t users;
} TnCorpusStats;

/**
 * Null-model parameters; mirrors the CLI flags.
 */
typedef struct {
  uint32_t replicas;
  uint32_t swaps_per_edge;
  bool preserve_reciprocal;
  uint64_t seed;
} TnNullConfig;

/**
 * Per-class significance row.
 */
typedef struct {
  uint16_t class_id;
  uint64_t observed;
  double mean_random;
  double std_random;
  double raw_diff;
  /**
   * Meaningful only when `z_defined` is true.
   */
  double z;
  bool z_defined;
} TnClassStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Short static description of a status code.
 */
const char *tn_status_name(TnStatus status);

/**
 * Library version as a static string.
 */
const char *tn_version(void);

/**
 * Ingests a JSONL corpus file.
 *
 * With `strict` set, the first invariant violation aborts with
 * `TN_STATUS_VALIDATION`; otherwise violations are repaired and listed in
 * the plain-text validation report. When `out_report` is non-null it
 * receives that report as a string to be released with
 * [`tn_string_free`]. On success `*out` owns the corpus.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer;
 * `out_report` may be null.
 */
TnStatus tn_corpus_open(const char *path, bool strict, TnCorpus **out, char **out_report);

/**
 * Releases a corpus handle. A null handle is a no-op.
 *
 * # Safety
 * `corpus` must be null or a pointer returned by [`tn_corpus_open`] that has
 * not been freed yet.
 */
void tn_corpus_free(TnCorpus *corpus);

/**
 * Exact corpus cardinalities.
 *
 * # Safety
 * `corpus` must be a live handle and `out` a valid pointer.
 */
TnStatus tn_corpus_stats(const TnCorpus *corpus, TnCorpusStats *out);

/**
 * Writes the 13 canonical class ids, ascending, into `out_ids`.
 *
 * # Safety
 * `out_ids` must point to at least [`TN_TRIAD_CLASS_COUNT`] writable `u16`s.
 */
TnStatus tn_triad_class_ids(uint16_t *out_ids);

/**
 * Classifies a 9-bit row-major adjacency code of a connected 3-node
 * digraph. Disconnected or diagonal-bearing codes yield
 * `TN_STATUS_INVALID_ARGUMENT`.
 *
 * # Safety
 * `out_class` must be a valid pointer.
 */
TnStatus tn_classify_code(uint16_t code, uint16_t *out_class);

/**
 * Exact motif census of one thread's reply graph. `out_counts` receives the
 * 13 per-class counts in ascending class-id order; `out_total` (optional,
 * may be null) receives the total number of connected triads.
 *
 * # Safety
 * `corpus` must be a live handle, `thread_id` a valid NUL-terminated string,
 * and `out_counts` must point to [`TN_TRIAD_CLASS_COUNT`] writable `u64`s.
 */
TnStatus tn_thread_census(const TnCorpus *corpus,
                          const char *thread_id,
                          uint64_t *out_counts,
                          uint64_t *out_total);

/**
 * Motif significance of one thread against its randomized ensemble.
 * The thread's replica stream is derived from `config.seed` and the thread
 * id, matching the CLI. `out` receives 13 rows in ascending class order.
 * Threads without connected triads yield `TN_STATUS_EMPTY`.
 *
 * # Safety
 * `corpus` must be a live handle, `thread_id` a valid NUL-terminated string,
 * `config` a valid pointer, and `out` must point to
 * [`TN_TRIAD_CLASS_COUNT`] writable [`TnClassStats`].
 */
TnStatus tn_thread_significance(const TnCorpus *corpus,
                                const char *thread_id,
                                const TnNullConfig *config,
                                TnClassStats *out);

/**
 * Pooled motif significance over every thread of the corpus: observed
 * censuses are summed and each thread is randomized with its own derived
 * seed, matching `threadnet nullmodel --aggregate`.
 *
 * # Safety
 * `corpus` must be a live handle, `config` a valid pointer, and `out` must
 * point to [`TN_TRIAD_CLASS_COUNT`] writable [`TnClassStats`].
 */
TnStatus tn_aggregate_significance(const TnCorpus *corpus,
                                   const TnNullConfig *config,
                                   TnClassStats *out);

/**
 * Renders the per-category user tables as two CSV strings (activity and
 * social attributes). With `median_percentages` set, percentage columns are
 * medians of per-user fractions instead of pooled rates. Both strings must
 * be released with [`tn_string_free`]. An empty corpus yields
 * `TN_STATUS_EMPTY`.
 *
 * # Safety
 * `corpus` must be a live handle; `out_table1` and `out_table2` must be
 * valid pointers.
 */
TnStatus tn_user_tables_csv(const TnCorpus *corpus,
                            bool median_percentages,
                            char **out_table1,
                            char **out_table2);

/**
 * Renders the thread-length motif profile as CSV. `bins` is a
 * comma-separated ascending edge list starting at 1, or null for the
 * default powers-of-two bins. The string must be released with
 * [`tn_string_free`]. A corpus with no connected triads yields
 * `TN_STATUS_EMPTY`.
 *
 * # Safety
 * `corpus` must be a live handle, `config` a valid pointer, `out_csv` a
 * valid pointer; `bins` may be null or a valid NUL-terminated string.
 */
TnStatus tn_profile_csv(const TnCorpus *corpus,
                        const char *bins,
                        const TnNullConfig *config,
                        char **out_csv);

/**
 * Releases a string returned by this library. A null pointer is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer returned by a `tn_*` function that has not
 * been freed yet.
 */
void tn_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THREADNET_H */
