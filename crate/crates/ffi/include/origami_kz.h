#ifndef ORIGAMI_KZ_H
#define ORIGAMI_KZ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OkzStatus {
  OKZ_STATUS_OK = 0,
  OKZ_STATUS_NULL_POINTER = 1,
  OKZ_STATUS_INVALID_INPUT = 2,
  OKZ_STATUS_NOT_CONNECTED = 3,
  OKZ_STATUS_SIZE_MISMATCH = 4,
  OKZ_STATUS_INCONCLUSIVE = 5,
  OKZ_STATUS_PRECONDITION = 6,
  OKZ_STATUS_INTERNAL = 7,
} OkzStatus;

/**
 * Opaque handle to a validated origami.
 */
typedef struct OkzOrigami OkzOrigami;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds an origami from 1-based images `h[i]`, `v[i]` of squares `1..=n`.
 *
 * # Safety
 * `h` and `v` must point to `n` readable values; `out` must be writable.
 */
enum OkzStatus okz_origami_new(size_t n,
                               const uint32_t *h,
                               const uint32_t *v,
                               struct OkzOrigami **out);

/**
 * Parses `{"n": …, "h": […], "v": […]}` with 1-based images.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum OkzStatus okz_origami_from_json(const char *json, struct OkzOrigami **out);

/**
 * # Safety
 * `o` must come from this library and not be freed twice.
 */
void okz_origami_free(struct OkzOrigami *o);

/**
 * Genus and cone orders (non-increasing, 0 for regular vertices). When
 * `kappa_cap` is too small nothing is written to `kappa`, `kappa_len`
 * still receives the required length and `SizeMismatch` is returned.
 *
 * # Safety
 * `kappa` must have room for `kappa_cap` values; other pointers writable.
 */
enum OkzStatus okz_origami_stratum(const struct OkzOrigami *o,
                                   size_t *genus,
                                   size_t *kappa,
                                   size_t kappa_cap,
                                   size_t *kappa_len);

/**
 * Homology data as JSON.
 *
 * # Safety
 * `o` must be a valid handle; `out` writable. Free the result with
 * [`okz_string_free`].
 */
enum OkzStatus okz_origami_homology_json(const struct OkzOrigami *o, char **out);

/**
 * Full check-theorem report (JSON) with the command-line exit code
 * (0 pass, 1 fail, 2 inconclusive) in `exit_code`.
 *
 * # Safety
 * `o` must be a valid handle; `out` and `exit_code` writable.
 */
enum OkzStatus okz_check_theorem_json(const struct OkzOrigami *o,
                                      uint64_t seed,
                                      char **out,
                                      int *exit_code);

/**
 * Holonomy around a square for a JSON instance with rational strings
 * (`pairing`, optional `p`, `a`, `b`, `delta`, `eps`, `v`).
 *
 * # Safety
 * `instance` must be NUL-terminated; `out` and `exit_code` writable.
 */
enum OkzStatus okz_holonomy_square_json(const char *instance, char **out, int *exit_code);

/**
 * Rescaled Lyapunov exponents (descending) of the cocycle over the orbit.
 * `relative` selects relative cohomology. `exponents` receives `len`
 * values; `SizeMismatch` if `cap` is smaller.
 *
 * # Safety
 * `o` must be a valid handle; `exponents` must have room for `cap` doubles.
 */
enum OkzStatus okz_lyapunov(const struct OkzOrigami *o,
                            uint64_t seed,
                            size_t steps,
                            bool relative,
                            double *exponents,
                            size_t cap,
                            size_t *len);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void okz_string_free(char *s);

/**
 * Message for the last failure on this thread; empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *okz_last_error_message(void);

/**
 * Library version, e.g. `"0.1.0"`.
 */
const char *okz_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORIGAMI_KZ_H */
