#ifndef DTOPO_H
#define DTOPO_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DtopoStatus {
  DTOPO_STATUS_OK = 0,
  DTOPO_STATUS_NULL_ARGUMENT = 1,
  DTOPO_STATUS_INVALID_UTF8 = 2,
  DTOPO_STATUS_PARSE = 3,
  DTOPO_STATUS_MALFORMED_SEQUENCE = 4,
  DTOPO_STATUS_OUT_OF_RANGE = 5,
  DTOPO_STATUS_INVALID_ARGUMENT = 6,
  DTOPO_STATUS_PRECONDITION = 7,
  DTOPO_STATUS_HORIZON = 8,
  DTOPO_STATUS_PANIC = 9,
} DtopoStatus;

/**
 * Opaque D-sequence handle.
 */
typedef struct DtopoSeq DtopoSeq;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *dtopo_last_error(void);

/**
 * Library version as a static string.
 */
const char *dtopo_version(void);

/**
 * Parse a sequence spec such as `"ratios:2,3;repeat growth=bounded"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DtopoStatus dtopo_seq_parse(const char *spec, struct DtopoSeq **out);

/**
 * # Safety
 * `seq` must come from [`dtopo_seq_parse`] and not be used afterwards.
 */
void dtopo_seq_free(struct DtopoSeq *seq);

/**
 * Term `b_n` as a decimal string.
 *
 * # Safety
 * `seq` must be a live handle and `out` a valid pointer.
 */
enum DtopoStatus dtopo_seq_term(const struct DtopoSeq *seq, size_t n, char **out);

/**
 * Greedy digit expansion of a decimal integer, as JSON.
 *
 * # Safety
 * `seq` must be a live handle, `value` NUL-terminated, `out` valid.
 */
enum DtopoStatus dtopo_expand(const struct DtopoSeq *seq, const char *value, char **out);

/**
 * Whether `x` lies in `b_n Z`.
 *
 * # Safety
 * `seq` must be a live handle, `x` NUL-terminated, `out` valid.
 */
enum DtopoStatus dtopo_lambda_member(const struct DtopoSeq *seq,
                                     size_t n,
                                     const char *x,
                                     bool *out);

/**
 * Whether `x` lies in the `tau_c` neighborhood at level `m`.
 *
 * # Safety
 * `c` must be a live handle, `x` NUL-terminated, `out` valid.
 */
enum DtopoStatus dtopo_tau_member(const struct DtopoSeq *c, uint64_t m, const char *x, bool *out);

/**
 * Run a command-line invocation (without the program name), storing the
 * JSON report or the error text in `out`. Returns the command's exit code.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings and `out` be valid.
 */
int dtopo_run(const char *const *argv, size_t argc, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void dtopo_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DTOPO_H */
