#ifndef DTS_H
#define DTS_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by all entry points.
 */
typedef enum DtsStatus {
  DTS_STATUS_OK = 0,
  DTS_STATUS_NULL_ARGUMENT = 1,
  DTS_STATUS_INVALID_UTF8 = 2,
  DTS_STATUS_PARSE_ERROR = 3,
  DTS_STATUS_TYPE_ERROR = 4,
  /**
   * The discourse could not be read or interpreted by the fragment.
   */
  DTS_STATUS_INTERPRETATION_ERROR = 5,
  /**
   * A felicity condition failed: some anaphor has no antecedent.
   */
  DTS_STATUS_NO_RESOLUTION = 6,
  DTS_STATUS_PANIC = 7,
} DtsStatus;

/**
 * A lexicon together with the signature it induces.
 */
typedef struct DtsEngine DtsEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * An engine over the bundled lexicon. Never null.
 */
struct DtsEngine *dts_engine_new(void);

/**
 * An engine over a lexicon given in the lexicon file format.
 *
 * # Safety
 * `source` must be a nul-terminated string and `out` a valid pointer.
 */
enum DtsStatus dts_engine_new_with_lexicon(const char *source, struct DtsEngine **out);

/**
 * # Safety
 * `engine` must come from one of the constructors and not be used again.
 */
void dts_engine_free(struct DtsEngine *engine);

/**
 * Adds `name : ty` to the signature used by the term entry points.
 * Discourses are always resolved against the lexicon's own signature.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum DtsStatus dts_declare(struct DtsEngine *engine, const char *name, const char *ty);

/**
 * Infers the type of a closed term and writes it to `out`.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum DtsStatus dts_infer_type(const struct DtsEngine *engine, const char *src, char **out);

/**
 * Checks a closed term against a type, with subtyping. On success `out`
 * receives the term with coercions inserted.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum DtsStatus dts_check_term(const struct DtsEngine *engine,
                              const char *src,
                              const char *ty,
                              char **out);

/**
 * Writes the coercion witness for `sub <: sup` to `out`, or null when the
 * relation does not hold. Both outcomes return `Ok`.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum DtsStatus dts_subtype(const struct DtsEngine *engine,
                           const char *sub,
                           const char *sup,
                           char **out);

/**
 * Interprets and resolves a discourse; `out` receives the JSON report.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum DtsStatus dts_resolve_discourse(const struct DtsEngine *engine,
                                     const char *discourse,
                                     bool trace,
                                     char **out);

/**
 * Like [`dts_resolve_discourse`] but writes one `label: formula` line per
 * reading.
 *
 * # Safety
 * Pointers must be valid; strings nul-terminated.
 */
enum DtsStatus dts_export_fol(const struct DtsEngine *engine, const char *discourse, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void dts_string_free(char *s);

/**
 * The message for the last failed call on this thread, or null. Valid
 * until the next call into the library on the same thread.
 */
const char *dts_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DTS_H */
