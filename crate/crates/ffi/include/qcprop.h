#ifndef QCPROP_H
#define QCPROP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>

/**
 * Result of an FFI call. The first four values match the CLI exit codes.
 */
typedef enum QcpropStatus {
  QCPROP_STATUS_OK = 0,
  /**
   * The question was answered in the negative.
   */
  QCPROP_STATUS_NEGATIVE = 1,
  /**
   * Malformed input: parse errors, unknown names, width mismatches.
   */
  QCPROP_STATUS_INVALID = 2,
  /**
   * A search or enumeration budget ran out before an answer.
   */
  QCPROP_STATUS_BUDGET = 3,
  /**
   * A required pointer argument was null.
   */
  QCPROP_STATUS_NULL_ARGUMENT = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  QCPROP_STATUS_UTF8 = 5,
  /**
   * The library panicked; the handle arguments should be considered unusable.
   */
  QCPROP_STATUS_PANIC = 6,
} QcpropStatus;

/**
 * A diagram in canonical form over the generators of some fragment.
 */
typedef struct QcpropDiagram QcpropDiagram;

/**
 * A loaded presentation.
 */
typedef struct QcpropFragment QcpropFragment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the library.
 */
const char *qcprop_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void qcprop_string_free(char *s);

/**
 * Loads a shipped fragment by name, or parses fragment source text when
 * `is_source` is nonzero. Unsound presentations are rejected.
 *
 * # Safety
 * `spec` must be a nul-terminated string; `out` must be writable.
 */
enum QcpropStatus qcprop_fragment_load(const char *spec,
                                       int is_source,
                                       struct QcpropFragment **out);

/**
 * # Safety
 * `f` must be null or a handle from [`qcprop_fragment_load`] not yet freed.
 */
void qcprop_fragment_free(struct QcpropFragment *f);

/**
 * SHA-256 of the fragment source, hex encoded. Free with [`qcprop_string_free`].
 *
 * # Safety
 * `f` must be a live fragment handle.
 */
char *qcprop_fragment_content_hash(const struct QcpropFragment *f);

/**
 * Checks every axiom exactly. `Ok` when all are sound, `Negative` otherwise.
 *
 * # Safety
 * `f` must be a live fragment handle.
 */
enum QcpropStatus qcprop_fragment_soundness(const struct QcpropFragment *f);

/**
 * Parses a term over the fragment's generators and shortcuts into canonical form.
 *
 * # Safety
 * `f` must be a live fragment handle, `term` nul-terminated, `out` writable.
 */
enum QcpropStatus qcprop_diagram_parse(const struct QcpropFragment *f,
                                       const char *term,
                                       struct QcpropDiagram **out);

/**
 * # Safety
 * `d` must be null or a handle from [`qcprop_diagram_parse`] not yet freed.
 */
void qcprop_diagram_free(struct QcpropDiagram *d);

/**
 * Number of wires of a diagram, or 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live diagram handle.
 */
size_t qcprop_diagram_width(const struct QcpropDiagram *d);

/**
 * The canonical term text of a diagram. Free with [`qcprop_string_free`].
 *
 * # Safety
 * `d` must be a live diagram handle.
 */
char *qcprop_diagram_normal_form(const struct QcpropDiagram *d);

/**
 * Exact unitary of a diagram as JSON: rows of entries, each entry the eight
 * rational coefficients over powers of a primitive 24th root of unity.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum QcpropStatus qcprop_diagram_eval_json(const struct QcpropFragment *f,
                                           const struct QcpropDiagram *d,
                                           char **out);

/**
 * Exact semantic equality of two diagrams: `Ok` if equal, `Negative` if not.
 *
 * # Safety
 * Handles must be live.
 */
enum QcpropStatus qcprop_diagram_semantically_equal(const struct QcpropFragment *f,
                                                    const struct QcpropDiagram *a,
                                                    const struct QcpropDiagram *b);

/**
 * Searches for a derivation from `a` to `b` within `max_depth` rule steps.
 * On `Ok`, `script_out` (if not null) receives the derivation script text.
 * Returns `Negative` when the diagrams differ semantically and `Budget` when
 * the search ran out.
 *
 * # Safety
 * Handles must be live; `script_out` must be null or writable.
 */
enum QcpropStatus qcprop_derive(const struct QcpropFragment *f,
                                const struct QcpropDiagram *a,
                                const struct QcpropDiagram *b,
                                size_t max_depth,
                                char **script_out);

/**
 * Replays every derivation in `src`. `Ok` when all check, `Negative` when
 * some step fails; the first failure is reported through [`qcprop_last_error`].
 *
 * # Safety
 * `src` must be a nul-terminated string.
 */
enum QcpropStatus qcprop_check_derivations(const char *src);

/**
 * Runs a CLI command, e.g. `{"closure", "Cliff", "--wires", "1"}` without the
 * program name. `json_out` receives the printed JSON; the return value is the
 * CLI exit code.
 *
 * # Safety
 * `argv` must point to `argc` nul-terminated strings; `json_out` must be writable.
 */
int qcprop_run_command(int argc, const char *const *argv, char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCPROP_H */
