#ifndef OMEGA_FT_H
#define OMEGA_FT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every call.
 */
typedef enum OmegaFtStatus {
  OMEGA_FT_STATUS_OK = 0,
  OMEGA_FT_STATUS_NULL_POINTER = 1,
  OMEGA_FT_STATUS_INVALID_PARAMETER = 2,
  OMEGA_FT_STATUS_UNKNOWN_FUNCTION = 3,
  OMEGA_FT_STATUS_UNSUPPORTED = 4,
  OMEGA_FT_STATUS_INELIGIBLE = 5,
  OMEGA_FT_STATUS_CONVERGENCE = 6,
  OMEGA_FT_STATUS_MISSING = 7,
  OMEGA_FT_STATUS_PANIC = 8,
} OmegaFtStatus;

/*
 Opaque function handle.
 */
typedef struct OmegaFtFunction OmegaFtFunction;

/*
 Complex value with its error estimate.
 */
typedef struct OmegaFtValue {
  double re;
  double im;
  double error_estimate;
} OmegaFtValue;

/*
 Both sides of the exchange identity and the a-priori bound.
 */
typedef struct OmegaFtExchange {
  struct OmegaFtValue lhs;
  struct OmegaFtValue rhs;
  double bound;
} OmegaFtExchange;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates a function from a catalog id (or `triangle_smoothed_gauss`,
 `k_<kernel family>`) and `count` named parameters.

 # Safety
 `id` must be a NUL-terminated string; `names` and `values` must point to
 `count` entries (they may be null when `count` is 0); `out` must be valid
 for writing. Release the handle with [`omega_ft_function_free`].
 */
enum OmegaFtStatus omega_ft_function_new(const char *id,
                                         const char *const *names,
                                         const double *values,
                                         uintptr_t count,
                                         struct OmegaFtFunction **out);

/*
 Releases a handle; null is ignored.

 # Safety
 `f` must come from [`omega_ft_function_new`] and not be used afterwards.
 */
void omega_ft_function_free(struct OmegaFtFunction *f);

/*
 `Ω_f(s)`.

 # Safety
 `f` must be a live handle and `out` valid for writing.
 */
enum OmegaFtStatus omega_ft_omega(const struct OmegaFtFunction *f,
                                  double s,
                                  double tol,
                                  struct OmegaFtValue *out);

/*
 `f̂(s)` by Richardson-extrapolated second differences of `Ω_f`.

 # Safety
 `f` must be a live handle and `out` valid for writing.
 */
enum OmegaFtStatus omega_ft_transform(const struct OmegaFtFunction *f,
                                      double s,
                                      double h0,
                                      uintptr_t levels,
                                      double tol,
                                      struct OmegaFtValue *out);

/*
 Alexiewicz norm `sup_x |∫_{-∞}^x f|` on the default grid.

 # Safety
 `f` must be a live handle and `out` valid for writing.
 */
enum OmegaFtStatus omega_ft_norm(const struct OmegaFtFunction *f, double tol, double *out);

/*
 `(f∗ψ_a)(x)` for the kernel family named `family`.

 # Safety
 `f` must be a live handle, `family` NUL-terminated and `out` valid for writing.
 */
enum OmegaFtStatus omega_ft_invert(const struct OmegaFtFunction *f,
                                   const char *family,
                                   double a,
                                   double x,
                                   double tol,
                                   struct OmegaFtValue *out);

/*
 `∫f̂g` and `∫fĝ` for an eligible `g`, with the a-priori bound.

 # Safety
 `f` and `g` must be live handles and `out` valid for writing.
 */
enum OmegaFtStatus omega_ft_exchange(const struct OmegaFtFunction *f,
                                     const struct OmegaFtFunction *g,
                                     double tol,
                                     struct OmegaFtExchange *out);

/*
 `∫_0^∞ s^{-ν} log(1 + y²/(s-x)²) ds` by quadrature, with its closed form.

 # Safety
 `numeric` and `closed_form` must be valid for writing.
 */
enum OmegaFtStatus omega_ft_example_integral(double nu,
                                             double x,
                                             double y,
                                             double tol,
                                             double *numeric,
                                             double *closed_form);

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *omega_ft_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *omega_ft_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMEGA_FT_H */
