#ifndef DAGREL_H
#define DAGREL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `DAGREL_CHECK_FAILED` and `DAGREL_INVALID_INPUT` match the
 * exit codes of the command line tool.
 */
typedef enum DagrelStatus {
  DAGREL_OK = 0,
  /**
   * A law check or mathematical precondition failed.
   */
  DAGREL_CHECK_FAILED = 1,
  /**
   * Malformed JSON, an invalid morphism, or mismatched types.
   */
  DAGREL_INVALID_INPUT = 2,
  DAGREL_NULL_POINTER = 3,
  /**
   * A panic was caught at the boundary.
   */
  DAGREL_INTERNAL = 4,
} DagrelStatus;

typedef enum DagrelCategory {
  DAGREL_MSURJ = 0,
  DAGREL_PINJ = 1,
  DAGREL_FINPROB = 2,
  DAGREL_MAT = 3,
} DagrelCategory;

/**
 * A validated morphism of one of the four instances.
 */
typedef struct DagrelMorphism DagrelMorphism;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the library as a static NUL-terminated string.
 */
const char *dagrel_version(void);

/**
 * Message for the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call into the library on the same
 * thread.
 */
const char *dagrel_last_error(void);

/**
 * Parses and validates a morphism of `category`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum DagrelStatus dagrel_morphism_from_json(enum DagrelCategory category,
                                            const char *json,
                                            struct DagrelMorphism **out);

/**
 * # Safety
 * `m` must come from this library and not be freed twice. Null is ignored.
 */
void dagrel_morphism_free(struct DagrelMorphism *m);

/**
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum DagrelStatus dagrel_morphism_category(const struct DagrelMorphism *m,
                                           enum DagrelCategory *out);

/**
 * Writes the JSON of `m` to `*out`; free it with [`dagrel_string_free`].
 *
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum DagrelStatus dagrel_morphism_to_json(const struct DagrelMorphism *m, char **out);

/**
 * `*out = s ∘ r`.
 *
 * # Safety
 * `s` and `r` must be live handles, `out` a writable pointer.
 */
enum DagrelStatus dagrel_compose(const struct DagrelMorphism *s,
                                 const struct DagrelMorphism *r,
                                 struct DagrelMorphism **out);

/**
 * # Safety
 * `r` must be a live handle, `out` a writable pointer.
 */
enum DagrelStatus dagrel_dagger(const struct DagrelMorphism *r, struct DagrelMorphism **out);

/**
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum DagrelStatus dagrel_is_isometry(const struct DagrelMorphism *m, bool *out);

/**
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum DagrelStatus dagrel_is_coisometry(const struct DagrelMorphism *m, bool *out);

/**
 * The dilator (msurj, finprob) or codilator (pinj, mat) of `m` as JSON
 * `{"left": .., "right": ..}`.
 *
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum DagrelStatus dagrel_dilation_json(const struct DagrelMorphism *m, char **out);

/**
 * Runs one law suite, or all six when `suite` is null, and writes the JSON
 * reports to `*out`. `samples` of 0 keeps the suite defaults. Returns
 * `DAGREL_CHECK_FAILED` (with the reports still written) when a law fails.
 *
 * # Safety
 * `suite` must be null or a NUL-terminated string, `out` a writable pointer.
 */
enum DagrelStatus dagrel_check_axioms(enum DagrelCategory category,
                                      const char *suite,
                                      uint64_t seed,
                                      size_t samples,
                                      char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void dagrel_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DAGREL_H */
