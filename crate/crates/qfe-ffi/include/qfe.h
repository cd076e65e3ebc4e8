#ifndef QFE_H
#define QFE_H

/* Generated by cbindgen from the qfe-ffi crate. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status of a qfe call. Nonzero values match the CLI exit-code classes.
typedef enum QfeStatus {
  QFE_STATUS_OK = 0,
  // Invalid argument, model or correlation data.
  QFE_STATUS_INVALID_ARGUMENT = 2,
  // Numerical failure (non-finite input, undefined value).
  QFE_STATUS_NUMERIC_ERROR = 3,
  // A dense-dimension or enumeration guard was hit.
  QFE_STATUS_RESOURCE_LIMIT = 4,
  // A required pointer was null.
  QFE_STATUS_NULL_POINTER = 5,
} QfeStatus;

// Which canonical (anti)commutation structure a model uses.
typedef enum QfeAlgebra {
  QFE_ALGEBRA_CAR = 0,
  QFE_ALGEBRA_CCR = 1,
} QfeAlgebra;

// Direct-integral model under construction: a uniform midpoint grid on the
// circle with one Hermitian fiber per node (empty until set).
typedef struct QfeModel QfeModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static C string.
const char *qfe_version(void);

// Message describing the most recent failure on this thread. The pointer
// stays valid until the next failing qfe call on the same thread.
const char *qfe_last_error_message(void);

// Fermionic entropy integrand η(λ) + η(1−λ), λ ∈ [0, 1].
//
// # Safety
// `out` must be a valid pointer to a double.
enum QfeStatus qfe_ecar(double lambda, double *out);

// Bosonic entropy integrand η(λ) − η(1+λ), λ ≥ 0.
//
// # Safety
// `out` must be a valid pointer to a double.
enum QfeStatus qfe_eccr(double lambda, double *out);

// Entropy of the quasi-free fermion state with the given Hermitian
// correlation matrix (spectrum in [0, 1]), in nats.
//
// # Safety
// `matrix` must point to 2*dim*dim doubles; `out` must be valid.
enum QfeStatus qfe_entropy_car(size_t dim, const double *matrix, double *out);

// Entropy of the quasi-free boson state with the given Hermitian positive
// semidefinite correlation matrix, in nats.
//
// # Safety
// `matrix` must point to 2*dim*dim doubles; `out` must be valid.
enum QfeStatus qfe_entropy_ccr(size_t dim, const double *matrix, double *out);

// Creates a model handle with `n_nodes` uniform grid nodes and 0×0 fibers.
// Returns null when `n_nodes` is 0. Free with `qfe_model_free`.
struct QfeModel *qfe_model_new(enum QfeAlgebra algebra, size_t n_nodes);

// Sets the Hermitian fiber at `node` (0-based). `dim` may be 0 to mark an
// empty fiber; otherwise `matrix` must point to 2*dim*dim doubles.
//
// # Safety
// `model` must come from `qfe_model_new`; `matrix` must be valid for the
// declared dimension.
enum QfeStatus qfe_model_set_fiber(struct QfeModel *model,
                                   size_t node,
                                   size_t dim,
                                   const double *matrix);

// Records the mass of the singular spectral part (diagnostic only; the
// singular part contributes zero entropy).
//
// # Safety
// `model` must come from `qfe_model_new`.
enum QfeStatus qfe_model_set_singular_rate(struct QfeModel *model, double rate);

// Evaluates the spectral-integral entropy rate of the model, in nats per
// step. Validates all fibers (Hermiticity, admissible spectrum).
//
// # Safety
// `model` must come from `qfe_model_new`; `out` must be valid.
enum QfeStatus qfe_model_entropy_rate(const struct QfeModel *model, double *out);

// Releases a model handle. Null is ignored.
//
// # Safety
// `model` must come from `qfe_model_new` and not be freed twice.
void qfe_model_free(struct QfeModel *model);

// Entropy rate of a multiplication-operator model on a single interval
// (a, b): (1/2π) ∫ E(ρ(x)) |ω′(x)| dx with midpoint samples of ω′ and ρ.
//
// # Safety
// `omega_prime` and `rho` must point to `len` doubles; `out` must be valid.
enum QfeStatus qfe_multiplication_entropy_rate(enum QfeAlgebra algebra,
                                               size_t len,
                                               double a,
                                               double b,
                                               const double *omega_prime,
                                               const double *rho,
                                               double *out);

// Empirical entropy rate S_n/n of the n-block Toeplitz restriction of a
// scalar symbol sampled on the uniform midpoint grid, together with the
// spectral-integral value for the same symbol.
//
// # Safety
// `samples` must point to `n_nodes` doubles; the out-pointers must be
// valid.
enum QfeStatus qfe_toeplitz_entropy_rate(enum QfeAlgebra algebra,
                                         size_t n_nodes,
                                         const double *samples,
                                         size_t n_blocks,
                                         double *out_rate,
                                         double *out_formula);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFE_H */
