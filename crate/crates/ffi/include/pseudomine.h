/* C interface for the pseudomine pseudocode-mining toolchain. */

#ifndef PSEUDOMINE_H
#define PSEUDOMINE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by the fallible entry points.
 */
typedef enum PmStatus {
  PM_OK = 0,
  PM_NULL_ARGUMENT = 1,
  PM_INVALID_UTF8 = 2,
  PM_INVALID_CONFIG = 3,
  PM_INVALID_ARGUMENT = 4,
  PM_RUN_FAILED = 5,
} PmStatus;

/**
 * Opaque pipeline handle holding a validated configuration.
 */
typedef struct PmPipeline PmPipeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread. Never NULL.
 */
const char *pm_last_error(void);

/**
 * Frees a string returned by this library. NULL is accepted.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `pm_*` function and not
 * yet freed.
 */
void pm_string_free(char *s);

/**
 * Creates a pipeline handle with default configuration.
 */
struct PmPipeline *pm_pipeline_default(void);

/**
 * Loads a pipeline handle from a TOML configuration file.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out` must be a valid
 * pointer to receive the handle.
 */
enum PmStatus pm_pipeline_load(const char *config_path, struct PmPipeline **out);

/**
 * Releases a pipeline handle. NULL is accepted.
 *
 * # Safety
 * `pipeline` must come from `pm_pipeline_default`/`pm_pipeline_load` and
 * not have been freed already.
 */
void pm_pipeline_free(struct PmPipeline *pipeline);

/**
 * Runs one stage by name (`ingest`, `detect`, `extract`, `refs`, `clean`,
 * `cluster`, `stats`, `sample`, `validate`, or `all`).
 *
 * # Safety
 * `pipeline` must be a live handle and `stage` a NUL-terminated string.
 */
enum PmStatus pm_pipeline_run(struct PmPipeline *pipeline, const char *stage);

/**
 * Strips LaTeX machinery from text under the default cleaning rules.
 * Returns a new string, or NULL with an error recorded.
 *
 * # Safety
 * `text` must be a NUL-terminated UTF-8 string.
 */
char *pm_clean(const char *text);

/**
 * Stems one lowercase word with the classic Porter algorithm.
 *
 * # Safety
 * `word` must be a NUL-terminated UTF-8 string.
 */
char *pm_stem(const char *word);

/**
 * Extracts algorithm environments from LaTeX text. Returns a JSON array of
 * span objects (`source_path`, `start_offset`, `end_offset`, `body`,
 * `raw`, `starred`, `nesting_depth_seen`), or NULL on error.
 *
 * # Safety
 * `latex` must be a NUL-terminated UTF-8 string.
 */
char *pm_extract_spans_json(const char *latex);

/**
 * Finds indicative keywords in plain text. Returns a JSON array of hit
 * objects (`keyword_class`, `matched_text`, `file_offset`), or NULL.
 *
 * # Safety
 * `text` must be a NUL-terminated UTF-8 string.
 */
char *pm_detect_keywords_json(const char *text);

/**
 * Cuts the sentence-trimmed snippet around a reference match located at
 * char offset `offset` with char length `length`. `span_chars` and
 * `boundary_window` follow the pipeline defaults of 1200 and 300.
 *
 * # Safety
 * `text` must be a NUL-terminated UTF-8 string and `out` a valid pointer.
 */
enum PmStatus pm_snippet(const char *text,
                         uintptr_t offset,
                         uintptr_t length,
                         uintptr_t span_chars,
                         uintptr_t boundary_window,
                         char **out);

/**
 * Library version, packed as (major << 16) | (minor << 8) | patch.
 */
uint32_t pm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSEUDOMINE_H */
