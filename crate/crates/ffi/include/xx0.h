#ifndef XX0_H
#define XX0_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Xx0Status {
  XX0_STATUS_OK = 0,
  XX0_STATUS_NULL_POINTER = 1,
  XX0_STATUS_DOMAIN = 2,
  XX0_STATUS_INVALID_ARGUMENT = 3,
  XX0_STATUS_DIVERGENCE = 4,
  XX0_STATUS_NON_CONVERGENCE = 5,
  XX0_STATUS_TRUNCATION = 6,
  XX0_STATUS_OVERFLOW = 7,
  XX0_STATUS_DIMENSION_OVERFLOW = 8,
  XX0_STATUS_ILL_CONDITIONED = 9,
  XX0_STATUS_INCONCLUSIVE = 10,
  XX0_STATUS_ATTEMPTS_EXHAUSTED = 11,
  XX0_STATUS_PANIC = 12,
} Xx0Status;

typedef enum Xx0Model {
  XX0_MODEL_GROSS_WITTEN = 0,
  XX0_MODEL_GAUSSIAN = 1,
} Xx0Model;

typedef enum Xx0Region {
  XX0_REGION_I = 1,
  XX0_REGION_II = 2,
  XX0_REGION_III = 3,
  XX0_REGION_IV = 4,
  XX0_REGION_QP_I = 5,
  XX0_REGION_QP_II = 6,
} Xx0Region;

typedef enum Xx0Suite {
  XX0_SUITE_ORACLE = 0,
  XX0_SUITE_MC = 1,
  XX0_SUITE_TW = 2,
  XX0_SUITE_ALL = 3,
} Xx0Suite;

/*
 Opaque Painleve II solution used for Tracy-Widom evaluation.
 */
typedef struct Xx0TwEvaluator Xx0TwEvaluator;

/*
 log|value| and its sign (+1/-1); a vanishing determinant has log_abs = -inf.
 */
typedef struct Xx0LogDet {
  double log_abs;
  int8_t sign;
} Xx0LogDet;

typedef struct Xx0PhasePoint {
  enum Xx0Region region;
  double free_energy;
  double wall_distance;
} Xx0PhasePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread; empty after a success. The pointer stays
 valid until the next xx0 call on the same thread.
 */
const char *xx0_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *xx0_version(void);

/*
 Solve Painleve II on [grid_lo, grid_hi] with the given step. Pass grid_lo = grid_hi = step = 0
 for the default grid.

 # Safety
 `out` must be valid for a pointer write.
 */
enum Xx0Status xx0_tw_evaluator_new(double grid_lo,
                                    double grid_hi,
                                    double step,
                                    struct Xx0TwEvaluator **out);

/*
 Release an evaluator; null is a no-op.

 # Safety
 `ev` must come from `xx0_tw_evaluator_new` and not be used afterwards.
 */
void xx0_tw_evaluator_free(struct Xx0TwEvaluator *ev);

/*
 F(x) from the evaluator.

 # Safety
 `ev` must be a live handle and `out` valid for writes.
 */
enum Xx0Status xx0_tw_cdf(const struct Xx0TwEvaluator *ev, double x, double *out);

/*
 1 - F(x) without cancellation on the right.

 # Safety
 `ev` must be a live handle and `out` valid for writes.
 */
enum Xx0Status xx0_tw_sf(const struct Xx0TwEvaluator *ev, double x, double *out);

/*
 F(x) as a Fredholm determinant of the Airy kernel with Gauss-Legendre order `quad_order`.

 # Safety
 `out` must be valid for writes.
 */
enum Xx0Status xx0_tw_cdf_fredholm(double x, size_t quad_order, double *out);

/*
 log D_{n_f}(f_GW) on the full circle.

 # Safety
 `out` must be valid for writes.
 */
enum Xx0Status xx0_partition_gw_infinite(uint32_t n_f, double t, struct Xx0LogDet *out);

/*
 log D^{|d|}_{n_f}(f_GW) on the roots of z^N = s with s = s_re + i s_im on the unit circle.

 # Safety
 `out` must be valid for writes.
 */
enum Xx0Status xx0_partition_gw_finite(uint32_t n,
                                       uint32_t n_f,
                                       double t,
                                       double s_re,
                                       double s_im,
                                       struct Xx0LogDet *out);

/*
 log of the discrete Gaussian Hankel determinant on N lattice points.

 # Safety
 `out` must be valid for writes.
 */
enum Xx0Status xx0_partition_qp_finite(uint32_t n, uint32_t n_f, struct Xx0LogDet *out);

/*
 (1/N_f^2) log Z for the finite model.

 # Safety
 `out` must be valid for writes.
 */
enum Xx0Status xx0_free_energy_finite(enum Xx0Model model,
                                      uint32_t n,
                                      uint32_t n_f,
                                      double t,
                                      double *out);

/*
 Normalised ratio c Z^{|d|}/Z and the Tracy-Widom value at the matching argument.

 # Safety
 `ev` must be a live handle; `out_ratio`, `out_x` and `out_f` valid for writes.
 */
enum Xx0Status xx0_ratio_to_tw(enum Xx0Model model,
                               uint32_t n,
                               uint32_t n_f,
                               double t,
                               const struct Xx0TwEvaluator *ev,
                               double *out_ratio,
                               double *out_x,
                               double *out_f);

/*
 P(W < N) for n_f nonintersecting bridges over time t.

 # Safety
 `out` must be valid for writes.
 */
enum Xx0Status xx0_width_probability(uint32_t n_f, double t, uint32_t n, double *out);

/*
 Region, free energy and wall distance at (tau, n_inv) in the finite Gross-Witten model.

 # Safety
 `out` must be valid for writes.
 */
enum Xx0Status xx0_classify(double tau, double n_inv, struct Xx0PhasePoint *out);

/*
 Run a validation suite. `out_pass` receives 1 when every criterion passed. If `out_json` is
 non-null it receives the report as a JSON string to be released with `xx0_string_free`.

 # Safety
 `out_pass` must be valid for writes; `out_json` null or valid for a pointer write.
 */
enum Xx0Status xx0_validate(enum Xx0Suite suite, uint64_t seed, int32_t *out_pass, char **out_json);

/*
 Free a string returned by this library; null is a no-op.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void xx0_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XX0_H */
