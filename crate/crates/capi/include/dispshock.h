/* dispshock C ABI -- generated by cbindgen, do not edit. */

#ifndef DISPSHOCK_H
#define DISPSHOCK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Profile columns addressable through `dispshock_profile_column`.
typedef enum DispshockColumn {
  DispshockColumn_Theta = 0,
  DispshockColumn_Tau = 1,
  DispshockColumn_U = 2,
  DispshockColumn_W = 3,
  DispshockColumn_Energy = 4,
  DispshockColumn_Field1 = 5,
  DispshockColumn_Field2 = 6,
  DispshockColumn_Field3 = 7,
} DispshockColumn;

// Status codes returned by every fallible call.
typedef enum DispshockStatus {
  DispshockStatus_Ok = 0,
  DispshockStatus_NullArgument = 1,
  DispshockStatus_InvalidUtf8 = 2,
  DispshockStatus_ConfigRejected = 3,
  DispshockStatus_DomainError = 4,
  DispshockStatus_HypothesisError = 5,
  DispshockStatus_NumericalError = 6,
  DispshockStatus_BufferTooSmall = 7,
} DispshockStatus;

// Opaque problem handle.
typedef struct DispshockProblem DispshockProblem;

// Opaque profile handle.
typedef struct DispshockProfile DispshockProfile;

// Scalar facts about a built problem.
typedef struct DispshockProblemInfo {
  double c;
  double c_star;
  double gamma_f;
  double e_max;
  double e_m;
  double u_minus;
  double u_plus;
  double u_s;
  double shock_speed;
  double epsilon;
  double delta;
  // 1 when c >= c_star (monotone profile).
  int32_t supercritical;
  // 1 when every structural hypothesis holds.
  int32_t admissible;
} DispshockProblemInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Crate version as a static NUL-terminated string.
const char *dispshock_version(void);

// Copy the last error message on this thread into `buf` (truncating) and
// return its full length in bytes, 0 when no error is recorded.
//
// # Safety
// `buf` must point to `cap` writable bytes, or be null (query length only).
uintptr_t dispshock_last_error(char *buf, uintptr_t cap);

// Build a problem handle from the same JSON document the CLI reads. The
// experiment section supplies the dispersion parameters.
//
// # Safety
// `config_json` must be a NUL-terminated string; `out` must be a valid
// pointer to receive the handle.
enum DispshockStatus dispshock_problem_from_json(const char *config_json,
                                                 struct DispshockProblem **out);

// Fill `info` with the problem landmarks.
//
// # Safety
// Both pointers must be valid.
enum DispshockStatus dispshock_problem_info(const struct DispshockProblem *handle,
                                            struct DispshockProblemInfo *info);

// Shoot the heteroclinic orbit and hand back a profile handle.
//
// # Safety
// `handle` must come from `dispshock_problem_from_json`; `out` must be valid.
enum DispshockStatus dispshock_profile_compute(const struct DispshockProblem *handle,
                                               struct DispshockProfile **out);

// Number of samples in a computed profile.
//
// # Safety
// `handle` must be a live profile handle (null returns 0).
uintptr_t dispshock_profile_len(const struct DispshockProfile *handle);

// Copy one column of the profile into a caller buffer of length `len`
// (which must be at least `dispshock_profile_len`).
//
// # Safety
// `buf` must point to `len` writable doubles.
enum DispshockStatus dispshock_profile_column(const struct DispshockProfile *handle,
                                              enum DispshockColumn column,
                                              double *buf,
                                              uintptr_t len);

// Release a problem handle.
//
// # Safety
// `handle` must be null or a pointer from `dispshock_problem_from_json`,
// not freed before.
void dispshock_problem_free(struct DispshockProblem *handle);

// Release a profile handle.
//
// # Safety
// `handle` must be null or a pointer from `dispshock_profile_compute`,
// not freed before.
void dispshock_profile_free(struct DispshockProfile *handle);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DISPSHOCK_H */
