/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef FGS_H
#define FGS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the first four match the command-line exit codes.
typedef enum FgsStatus {
  FGS_STATUS_OK = 0,
  // Configuration violates an admissibility condition.
  FGS_STATUS_INADMISSIBLE = 1,
  // A numerical invariant failed.
  FGS_STATUS_NUMERICAL = 2,
  // Malformed input data or JSON.
  FGS_STATUS_SCHEMA = 3,
  FGS_STATUS_NULL_POINTER = 4,
  // Output buffer shorter than the result; the required length is still reported.
  FGS_STATUS_BUFFER_TOO_SMALL = 5,
  // The pole lies at the evaluation point.
  FGS_STATUS_POLE = 6,
  FGS_STATUS_PANIC = 7,
} FgsStatus;

// Eigenvalues and resonances over a band set.
typedef struct FgsConfig FgsConfig;

// An m-function (line) or Carathéodory function (circle).
typedef struct FgsFunction FgsFunction;

typedef struct FgsMeasure FgsMeasure;

// A band set on the line or the circle.
typedef struct FgsSet FgsSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *fgs_last_error(void);

// # Safety
// `s` must come from this library or be NULL.
void fgs_string_free(char *s);

// Line set from `n_edges` band edges `α₁, β₁, α₂, …`, strictly increasing.
//
// # Safety
// `edges` must hold `n_edges` doubles; `out` must be writable.
enum FgsStatus fgs_set_line(const double *edges, size_t n_edges, struct FgsSet **out);

// Circle set from `n_angles` arc end angles in radians.
//
// # Safety
// `angles` must hold `n_angles` doubles; `out` must be writable.
enum FgsStatus fgs_set_circle(const double *angles, size_t n_angles, struct FgsSet **out);

// # Safety
// `text_json` must be a NUL-terminated string; `out` must be writable.
enum FgsStatus fgs_set_from_json(const char *text_json, struct FgsSet **out);

// Number of bounded gaps, or 0 for NULL.
//
// # Safety
// `set` must be a live handle or NULL.
size_t fgs_set_l(const struct FgsSet *set);

// # Safety
// `set` must come from this library or be NULL.
void fgs_set_free(struct FgsSet *set);

// Configuration over `set`. Eigenvalues are real points on the line and
// angles on the circle; resonance `j` is `res_re[j] + i·res_im[j]` with
// multiplicity `res_mult[j]`.
//
// # Safety
// Arrays must hold the stated counts; `out` must be writable.
enum FgsStatus fgs_config_new(const struct FgsSet *set,
                              const double *eigenvalues,
                              size_t n_eigenvalues,
                              const double *res_re,
                              const double *res_im,
                              const size_t *res_mult,
                              size_t n_resonances,
                              struct FgsConfig **out);

// # Safety
// `set` must be live, `text_json` NUL-terminated, `out` writable.
enum FgsStatus fgs_config_from_json(const struct FgsSet *set,
                                    const char *text_json,
                                    struct FgsConfig **out);

// # Safety
// `config` must come from this library or be NULL.
void fgs_config_free(struct FgsConfig *config);

// Perturbation order of an admissible configuration. On
// `FGS_STATUS_INADMISSIBLE` the last error names the violated conditions.
//
// # Safety
// Handles must be live; `s_out` writable.
enum FgsStatus fgs_validate(const struct FgsSet *set,
                            const struct FgsConfig *config,
                            size_t *s_out);

// # Safety
// Handles must be live; `out` writable.
enum FgsStatus fgs_build_measure(const struct FgsSet *set,
                                 const struct FgsConfig *config,
                                 struct FgsMeasure **out);

// Band density at a spectral coordinate (zero off the bands).
//
// # Safety
// `measure` must be live; `out` writable.
enum FgsStatus fgs_measure_density(const struct FgsMeasure *measure, double x, double *out);

// Copies point masses (coordinate and weight) into buffers of length
// `cap`; `count_out` receives the number of masses.
//
// # Safety
// `at` and `w` must hold `cap` doubles (may be NULL when `cap` is 0).
enum FgsStatus fgs_measure_masses(const struct FgsMeasure *measure,
                                  double *at,
                                  double *w,
                                  size_t cap,
                                  size_t *count_out);

// # Safety
// `measure` must be live; `out` writable. Free the string with [`fgs_string_free`].
enum FgsStatus fgs_measure_to_json(const struct FgsMeasure *measure, char **out);

// # Safety
// `measure` must come from this library or be NULL.
void fgs_measure_free(struct FgsMeasure *measure);

// m-function (line set) or Carathéodory function (circle set) of a configuration.
//
// # Safety
// Handles must be live; `out` writable.
enum FgsStatus fgs_build_function(const struct FgsSet *set,
                                  const struct FgsConfig *config,
                                  struct FgsFunction **out);

// # Safety
// `text_json` NUL-terminated; `out` writable.
enum FgsStatus fgs_function_from_json(const char *text_json, struct FgsFunction **out);

// # Safety
// `f` must be live; `out` writable. Free the string with [`fgs_string_free`].
enum FgsStatus fgs_function_to_json(const struct FgsFunction *f, char **out);

// Value at `(re + i·im, sheet)` with `sheet` `+1` or `-1`.
// `FGS_STATUS_POLE` when the point is a pole.
//
// # Safety
// `f` must be live; outputs writable.
enum FgsStatus fgs_function_eval(const struct FgsFunction *f,
                                 double re,
                                 double im,
                                 int sheet,
                                 double *out_re,
                                 double *out_im);

// Jacobi prefix `(a_k, b_k)` of an m-function. `s_out` receives the
// perturbation order; buffers of length `cap` must hold `s` entries.
//
// # Safety
// `f` must be live; `a`, `b` hold `cap` doubles; `s_out` writable.
enum FgsStatus fgs_recover_jacobi(const struct FgsFunction *f,
                                  size_t max_steps,
                                  double *a,
                                  double *b,
                                  size_t cap,
                                  size_t *s_out);

// Verblunsky prefix `α_k` of a Carathéodory function, split into real and
// imaginary parts.
//
// # Safety
// `f` must be live; `re`, `im` hold `cap` doubles; `s_out` writable.
enum FgsStatus fgs_recover_verblunsky(const struct FgsFunction *f,
                                      size_t max_steps,
                                      double *re,
                                      double *im,
                                      size_t cap,
                                      size_t *s_out);

// # Safety
// `f` must come from this library or be NULL.
void fgs_function_free(struct FgsFunction *f);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FGS_H */
