#ifndef TMS_H
#define TMS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TmsRegime {
  TMS_REGIME_SELF_ADJOINT = 0,
  TMS_REGIME_IMAGINARY_PAIR_ZEROS = 1,
  TMS_REGIME_DOUBLE_ZERO = 2,
  TMS_REGIME_REAL_LINE_ZEROS = 3,
} TmsRegime;

typedef enum TmsStatus {
  TMS_STATUS_OK = 0,
  TMS_STATUS_NULL_POINTER = 1,
  TMS_STATUS_INVALID_ARGUMENT = 2,
  TMS_STATUS_REGIME_MISMATCH = 3,
  TMS_STATUS_NUMERIC_FAILURE = 4,
  TMS_STATUS_BUFFER_TOO_SMALL = 5,
  TMS_STATUS_PANIC = 6,
} TmsStatus;

/**
 * Opaque model for one mass parameter in the real-line regime.
 */
typedef struct TmsModel TmsModel;

typedef struct TmsConstants {
  double mu0;
  double mu1;
  double m0;
  double m1;
} TmsConstants;

typedef struct TmsZeros {
  enum TmsRegime regime;
  double z_plus_re;
  double z_plus_im;
  double z_minus_re;
  double z_minus_im;
  /**
   * NaN when the pair is not on the middle line.
   */
  double s0;
  /**
   * NaN when the pair is not on the imaginary axis.
   */
  double t0;
} TmsZeros;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *tms_last_error(void);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `TmsConstants`.
 */
enum TmsStatus tms_constants(struct TmsConstants *out);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `TmsZeros`.
 */
enum TmsStatus tms_zeros(double mu, struct TmsZeros *out);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `TmsRegime`.
 */
enum TmsStatus tms_regime(double mu, enum TmsRegime *out);

/**
 * Builds the model for `mu`, which must lie in the real-line regime.
 *
 * # Safety
 * `out` must be null or point to writable memory for one pointer. On success
 * `*out` owns a model that must be released with [`tms_model_free`].
 */
enum TmsStatus tms_model_new(double mu, struct TmsModel **out);

/**
 * # Safety
 * `model` must be null or a pointer from [`tms_model_new`] not yet freed.
 */
void tms_model_free(struct TmsModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` writable for one `double`.
 */
enum TmsStatus tms_model_s0(const struct TmsModel *model, double *out);

/**
 * Ladder entries `λ_n`, `n = n_min..=n_max`, written to `out[0..count]`.
 * `*written` receives the number of entries; if `capacity` is smaller the call
 * fails with `BufferTooSmall` and writes nothing else.
 *
 * # Safety
 * `model` must be a live handle, `out` writable for `capacity` doubles and
 * `written` writable for one `size_t`.
 */
enum TmsStatus tms_ladder(const struct TmsModel *model,
                          double beta_re,
                          double beta_im,
                          int64_t n_min,
                          int64_t n_max,
                          double *out,
                          size_t capacity,
                          size_t *written);

/**
 * Determinant zeros of the resolvent system in `[lo, hi]` (both negative),
 * in increasing order. Buffer semantics as in [`tms_ladder`].
 *
 * # Safety
 * As for [`tms_ladder`].
 */
enum TmsStatus tms_detect(const struct TmsModel *model,
                          double beta_re,
                          double beta_im,
                          double lo,
                          double hi,
                          double *out,
                          size_t capacity,
                          size_t *written);

/**
 * `−(λ/ε)^{−2}`.
 *
 * # Safety
 * `out` must be writable for one `double`.
 */
enum TmsStatus tms_h_level(double lambda, double eps, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TMS_H */
