/* C ABI for the fuzzy-vc library. Generated by cbindgen; do not edit. */

#ifndef FUZZY_VC_H
#define FUZZY_VC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirrored from the library's error kinds.
typedef enum FvcStatus {
  FvcStatus_Ok = 0,
  // A pointer argument was null or otherwise unusable.
  FvcStatus_InvalidArgument = 1,
  // Input bytes failed schema or invariant validation.
  FvcStatus_ParseError = 2,
  // An argument was outside an operation's domain.
  FvcStatus_DomainError = 3,
  // The instance is too large for an exhaustive operation.
  FvcStatus_CapacityError = 4,
  // No feasible object exists.
  FvcStatus_Infeasible = 5,
  // A bounded search ended without a witness.
  FvcStatus_NotFound = 6,
  // A stated hypothesis failed on the input.
  FvcStatus_HypothesisFailed = 7,
  // An internal invariant was violated; report a bug.
  FvcStatus_InternalError = 8,
} FvcStatus;

// Opaque parsed instance.
typedef struct FvcInstance FvcInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fvc_version(void);

// Copy of the most recent error message on this thread, or null when no
// error has occurred. Release with `fvc_string_free`.
char *fvc_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a pointer previously returned by this library.
void fvc_string_free(char *s);

// Parses an instance document (any of the five schemas) into a handle.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be a valid pointer.
enum FvcStatus fvc_instance_parse(const char *json, struct FvcInstance **out);

// Releases an instance handle.
//
// # Safety
// `h` must be null or a handle from `fvc_instance_parse`.
void fvc_instance_free(struct FvcInstance *h);

// Writes the instance's type tag ("fuzzy_system", "measure", ...).
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_instance_kind(const struct FvcInstance *h, char **out);

// Canonical JSON (sorted keys, no whitespace) of the instance.
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_instance_canonical_json(const struct FvcInstance *h, char **out);

// Hex SHA-256 digest of the canonical bytes.
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_instance_digest(const struct FvcInstance *h, char **out);

// VC-dimension of a fuzzy or crisp set system; -1 encodes the absent
// value of the empty family.
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_vc_dimension(const struct FvcInstance *h, int64_t *out);

// Shatter function value at `n`.
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_shatter_function(const struct FvcInstance *h, uint64_t n, uint64_t *out);

// The polynomial shatter bound `sum_{k <= d} n^k` as a decimal string.
//
// # Safety
// `out` must be valid.
enum FvcStatus fvc_sauer_bound(uint64_t d, uint64_t n, char **out);

// Fat-shattering dimension of a function class at gap `num/den`.
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_fat_shattering(const struct FvcInstance *h,
                                  int64_t eps_num,
                                  int64_t eps_den,
                                  uint64_t *out);

// Gap VC-dimension of a function class at gap `num/den`.
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_vc_eps(const struct FvcInstance *h,
                          int64_t eps_num,
                          int64_t eps_den,
                          uint64_t *out);

// Fractional transversal of a crisp set system, as canonical JSON
// `{"tau_star": "p/q", "weights": ["p/q", ...]}`.
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_fractional_transversal(const struct FvcInstance *h, char **out);

// Exact minimum transversal size of a crisp set system.
//
// # Safety
// `h` must be a live handle; `out` must be valid.
enum FvcStatus fvc_transversal_number(const struct FvcInstance *h, uint64_t *out);

// Greedy verified eps-net of a fuzzy system under a measure handle
// (null measure means uniform), as canonical JSON
// `{"net": [..], "heavy_sets": n}`.
//
// # Safety
// `h` and `measure` must be live handles (measure may be null); `out`
// must be valid.
enum FvcStatus fvc_find_eps_net_greedy(const struct FvcInstance *h,
                                       const struct FvcInstance *measure,
                                       int64_t eps_num,
                                       int64_t eps_den,
                                       char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FUZZY_VC_H */
