#ifndef PQUOT_H
#define PQUOT_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdint.h>

/**
 * Result of every `pq_*` call.
 */
typedef enum PqStatus {
  PQ_STATUS_OK = 0,
  /**
   * Invalid input: syntax, arguments, not p-closed, unsupported characteristic.
   */
  PQ_STATUS_USER = 1,
  /**
   * Precision or degree bound too low.
   */
  PQ_STATUS_PRECISION = 2,
  /**
   * The coefficient field must be extended.
   */
  PQ_STATUS_FIELD = 3,
  /**
   * An internal consistency check failed.
   */
  PQ_STATUS_INTERNAL = 4,
  /**
   * A required pointer argument was null.
   */
  PQ_STATUS_NULL_ARGUMENT = 5,
  /**
   * A string argument was not valid UTF-8.
   */
  PQ_STATUS_INVALID_UTF8 = 6,
  /**
   * A panic was caught at the boundary.
   */
  PQ_STATUS_PANIC = 7,
} PqStatus;

/**
 * Opaque derivation handle.
 */
typedef struct PqDerivation PqDerivation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *pq_version(void);

/**
 * Message of the last failed call on this thread; empty if none. Valid until the next failure.
 */
const char *pq_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void pq_string_free(char *s);

/**
 * Parses a derivation such as `y*dx + x^2*dy` over F_{p^k}.
 */
enum PqStatus pq_derivation_parse(const char *text,
                                  uint32_t p,
                                  uint32_t k,
                                  struct PqDerivation **out);

/**
 * Releases a derivation handle. Null is ignored.
 */
void pq_derivation_free(struct PqDerivation *d);

/**
 * Canonical text of a derivation.
 */
enum PqStatus pq_derivation_render(const struct PqDerivation *d, char **out);

/**
 * Largest `m` with every coefficient in the m-th power of the maximal ideal.
 */
enum PqStatus pq_derivation_order(const struct PqDerivation *d, uint64_t *out);

/**
 * p-closedness class: `NotPClosed`, `Multiplicative`, `Additive` or `PClosedNonUnit`.
 */
enum PqStatus pq_derivation_pclosedness(const struct PqDerivation *d, char **out);

/**
 * Full classification report as JSON. `precision` 0 and `depth` 0 select the defaults.
 */
enum PqStatus pq_classify_json(const struct PqDerivation *d,
                               uint64_t precision,
                               uint32_t depth,
                               char **out);

/**
 * Discrepancies of the minimal resolution of 1/p(1, lambda) as a JSON report.
 */
enum PqStatus pq_hj_discrepancies_json(uint32_t p, uint32_t lambda, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PQUOT_H */
