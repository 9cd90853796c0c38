/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef ADQ_H
#define ADQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AdqObservable {
  ADQ_OBSERVABLE_K0 = 0,
  ADQ_OBSERVABLE_K1 = 1,
  ADQ_OBSERVABLE_K2 = 2,
  ADQ_OBSERVABLE_KPLUS = 3,
  ADQ_OBSERVABLE_KMINUS = 4,
} AdqObservable;

typedef enum AdqStatus {
  ADQ_STATUS_OK = 0,
  /*
   malformed argument, descriptor or buffer size
   */
  ADQ_STATUS_INVALID_ARGUMENT = 1,
  ADQ_STATUS_NULL_POINTER = 2,
  /*
   parameters outside the mathematical domain (e.g. weight incompatible with eta)
   */
  ADQ_STATUS_DOMAIN = 3,
  ADQ_STATUS_NUMERIC = 4,
  /*
   a series or limit did not converge
   */
  ADQ_STATUS_CONVERGENCE = 5,
  ADQ_STATUS_PANIC = 6,
} AdqStatus;

/*
 Dense truncated operator.
 */
typedef struct AdqOperator AdqOperator;

/*
 Diagonal quantizer M for one weight and truncation.
 */
typedef struct AdqQuantizer AdqQuantizer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or NULL. Valid until the next
 failing call on the same thread.
 */
const char *adq_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *adq_version(void);

/*
 Builds the quantizer for `weight` ("perelomov", "power:<s>", "basis:<m>", "half",
 "custom:<path>") at representation label `eta` and truncation `dim`.

 # Safety
 `weight` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AdqStatus adq_quantizer_new(double eta,
                                 const char *weight,
                                 size_t dim,
                                 struct AdqQuantizer **out);

/*
 # Safety
 `q` must come from `adq_quantizer_new` and not be used afterwards; NULL is ignored.
 */
void adq_quantizer_free(struct AdqQuantizer *q);

/*
 Truncation dimension, 0 for NULL.

 # Safety
 `q` must be a live handle or NULL.
 */
size_t adq_quantizer_dim(const struct AdqQuantizer *q);

/*
 Copies the first `len` diagonal entries M_kk; `len` may not exceed the dimension.

 # Safety
 `out` must point to `len` writable doubles.
 */
enum AdqStatus adq_quantizer_diagonal(const struct AdqQuantizer *q, double *out, size_t len);

/*
 Proportionality constant gamma with A_{k_a} = gamma times a generator; needs eta > 1.

 # Safety
 `q` must be a live handle and `out` a valid pointer.
 */
enum AdqStatus adq_quantizer_gamma(const struct AdqQuantizer *q, double *out);

/*
 Quantizes a basic observable; zero grid orders select the defaults (64, 256).

 # Safety
 `q` must be a live handle and `out` a valid pointer.
 */
enum AdqStatus adq_quantize_observable(const struct AdqQuantizer *q,
                                       enum AdqObservable observable,
                                       size_t radial_order,
                                       size_t angular_points,
                                       struct AdqOperator **out);

/*
 Truncation of U(p(z)) to the first `dim` basis vectors.

 # Safety
 `out` must be a valid pointer.
 */
enum AdqStatus adq_u_matrix_p(double eta,
                              double re_z,
                              double im_z,
                              size_t dim,
                              struct AdqOperator **out);

/*
 # Safety
 `op` must be a live handle or NULL.
 */
size_t adq_operator_dim(const struct AdqOperator *op);

/*
 Row-major real and imaginary parts; `len` must equal dim * dim.

 # Safety
 `re` and `im` must each point to `len` writable doubles.
 */
enum AdqStatus adq_operator_entries(const struct AdqOperator *op,
                                    double *re,
                                    double *im,
                                    size_t len);

/*
 # Safety
 `op` must come from this library and not be used afterwards; NULL is ignored.
 */
void adq_operator_free(struct AdqOperator *op);

/*
 Portrait of a basic observable at z for the analysis/reconstruction pair (q1, q2).

 # Safety
 `q1`, `q2` must be live handles; `out_re`, `out_im` valid pointers.
 */
enum AdqStatus adq_portrait_value(const struct AdqQuantizer *q1,
                                  const struct AdqQuantizer *q2,
                                  enum AdqObservable observable,
                                  double re_z,
                                  double im_z,
                                  double *out_re,
                                  double *out_im);

/*
 kappa with portrait(k_a) = kappa k_a, checked for constancy across the disk.

 # Safety
 `q1`, `q2` must be live handles and `out` a valid pointer.
 */
enum AdqStatus adq_kappa(const struct AdqQuantizer *q1, const struct AdqQuantizer *q2, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADQ_H */
