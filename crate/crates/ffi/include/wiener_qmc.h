#ifndef WIENER_QMC_H
#define WIENER_QMC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WqStatus {
  WQ_STATUS_OK = 0,
  WQ_STATUS_INVALID_ARGUMENT = 1,
  WQ_STATUS_NULL_POINTER = 2,
  WQ_STATUS_DIMENSION_MISMATCH = 3,
  WQ_STATUS_SEARCH_EXHAUSTED = 4,
  WQ_STATUS_OVERFLOW = 5,
  WQ_STATUS_IO = 6,
  WQ_STATUS_PANIC = 7,
} WqStatus;

typedef enum WqWeight {
  WQ_WEIGHT_UNIT = 0,
  WQ_WEIGHT_R0 = 1,
  WQ_WEIGHT_R1 = 2,
  WQ_WEIGHT_R2 = 3,
  WQ_WEIGHT_R3 = 4,
  WQ_WEIGHT_R4 = 5,
} WqWeight;

/**
 * Opaque point set.
 */
typedef struct WqPointSet WqPointSet;

/**
 * Opaque Fourier polynomial.
 */
typedef struct WqPolynomial WqPolynomial;

/**
 * Opaque quadrature rule.
 */
typedef struct WqRule WqRule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next `wq_*` call on the same thread.
 */
const char *wq_last_error(void);

/**
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_point_set_korobov_s(size_t d, uint64_t p, struct WqPointSet **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_point_set_korobov_t(size_t d, uint64_t p, struct WqPointSet **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_point_set_union_p1(size_t d, uint64_t m, struct WqPointSet **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_point_set_union_p2(size_t d, uint64_t m, struct WqPointSet **out);

/**
 * Rank-1 lattice `{(h z mod p)/p}` with `z` of length `d`.
 *
 * # Safety
 * `z` must point to `d` readable values.
 */
enum WqStatus wq_point_set_lattice(uint64_t p,
                                   const uint64_t *z,
                                   size_t d,
                                   struct WqPointSet **out);

/**
 * Number of nodes, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t wq_point_set_len(const struct WqPointSet *set);

/**
 * Dimension, or 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t wq_point_set_dim(const struct WqPointSet *set);

/**
 * Copies node `index` as `dim` numerators plus the common denominator.
 *
 * # Safety
 * `numerators` must have room for `dim` values.
 */
enum WqStatus wq_point_set_node(const struct WqPointSet *set,
                                size_t index,
                                uint64_t *numerators,
                                uint64_t *den);

/**
 * # Safety
 * `set` must be NULL or a handle not yet freed.
 */
void wq_point_set_free(struct WqPointSet *set);

/**
 * Equal-weight rule on a copy of `set`.
 *
 * # Safety
 * `set` must be a live handle.
 */
enum WqStatus wq_rule_qmc(const struct WqPointSet *set, struct WqRule **out);

/**
 * Rule with explicit coefficients, one per node of `set`.
 *
 * # Safety
 * `coefficients` must point to `len` readable values.
 */
enum WqStatus wq_rule_new(const struct WqPointSet *set,
                          const double *coefficients,
                          size_t len,
                          struct WqRule **out);

/**
 * The rule `f(0)/2`.
 *
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_rule_origin_half(size_t d, struct WqRule **out);

/**
 * # Safety
 * `rule` must be NULL or a live handle.
 */
size_t wq_rule_len(const struct WqRule *rule);

/**
 * # Safety
 * `rule` must be NULL or a handle not yet freed.
 */
void wq_rule_free(struct WqRule *rule);

/**
 * `Σ_h c_h exp(2πi k·x_h)`.
 *
 * # Safety
 * `k` must point to `d` readable values; `re`, `im` must be writable.
 */
enum WqStatus wq_exp_sum(const struct WqRule *rule,
                         const int64_t *k,
                         size_t d,
                         double *re,
                         double *im);

/**
 * Worst-case error over every `k ∈ [−bound, bound]^d`.
 *
 * # Safety
 * `rule` must be a live handle; `out` must be writable.
 */
enum WqStatus wq_wce_box(const struct WqRule *rule,
                         uint32_t bound,
                         enum WqWeight weight,
                         double *out);

/**
 * # Safety
 * `k` must point to `d` readable values; `out` must be writable.
 */
enum WqStatus wq_weight(enum WqWeight weight, const int64_t *k, size_t d, double *out);

/**
 * The zero polynomial in `d` variables.
 *
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_polynomial_new(size_t d, struct WqPolynomial **out);

/**
 * Adds `(re + i im) exp(2πi k·x)`.
 *
 * # Safety
 * `poly` must be a live handle; `k` must point to `d` readable values.
 */
enum WqStatus wq_polynomial_add_term(struct WqPolynomial *poly,
                                     const int64_t *k,
                                     size_t d,
                                     double re,
                                     double im);

/**
 * Parses `[[k, re, im], ...]`.
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum WqStatus wq_polynomial_from_json(const char *json, struct WqPolynomial **out);

/**
 * `Σ_k |f̂(k)| r(k)`.
 *
 * # Safety
 * `poly` must be a live handle; `out` must be writable.
 */
enum WqStatus wq_polynomial_norm(const struct WqPolynomial *poly,
                                 enum WqWeight weight,
                                 double *out);

/**
 * # Safety
 * `poly` must be NULL or a handle not yet freed.
 */
void wq_polynomial_free(struct WqPolynomial *poly);

/**
 * `Q(f)`; the imaginary part vanishes for real-valued `f` up to rounding.
 *
 * # Safety
 * Handles must be live; `re`, `im` must be writable.
 */
enum WqStatus wq_apply(const struct WqRule *rule,
                       const struct WqPolynomial *poly,
                       double *re,
                       double *im);

/**
 * Mean `|I(f) − Q(f)|` of the randomized lattice rule over trials `0..trials`.
 *
 * # Safety
 * `poly` must be a live handle; `out` must be writable.
 */
enum WqStatus wq_randomized_error(uint64_t m,
                                  uint64_t seed,
                                  const struct WqPolynomial *poly,
                                  uint64_t trials,
                                  double *out);

/**
 * Smallest `|P_m| log m / m` over `m ∈ [m_lo, m_hi]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_density_c_hat(uint64_t m_lo, uint64_t m_hi, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_min_n_hoeffding(double delta, size_t d, uint64_t *out);

/**
 * `WQ_STATUS_OVERFLOW` when the value does not fit in 64 bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_dirichlet_m(uint32_t n, double rho, double coeff_abs_sum, uint64_t *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum WqStatus wq_r0_complexity_lower_bound(double eps, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WIENER_QMC_H */
