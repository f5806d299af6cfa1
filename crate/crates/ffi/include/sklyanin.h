#ifndef SKLYANIN_H
#define SKLYANIN_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum SkStatus {
  SK_STATUS_OK = 0,
  SK_STATUS_NULL_POINTER = 1,
  SK_STATUS_INVALID_UTF8 = 2,
  SK_STATUS_INVALID_PARAMETER = 3,
  SK_STATUS_NON_CONVERGENCE = 4,
  SK_STATUS_ETA_ZERO = 5,
  SK_STATUS_DEGENERATE_NODES = 6,
  SK_STATUS_DEGENERATE_PARAMS = 7,
  SK_STATUS_DEGENERATE_ETA = 8,
  SK_STATUS_INDEX_OUT_OF_RANGE = 9,
  SK_STATUS_ORDER_MISMATCH = 10,
  SK_STATUS_SINGULAR_EXTRACTION = 11,
  SK_STATUS_POLE_HIT = 12,
  SK_STATUS_GRID_TOO_COARSE = 13,
  SK_STATUS_INVALID_BASIS = 14,
  SK_STATUS_ILL_CONDITIONED = 15,
  SK_STATUS_CONFIG = 16,
  SK_STATUS_IO = 17,
  SK_STATUS_PANIC = 99,
} SkStatus;

// Modular parameters `tau = i tau_im` and `eta`, with the theta evaluator.
typedef struct SkContext SkContext;

// A solved table of 6j-symbols.
typedef struct SkSixJTable SkSixJTable;

// A complex number `re + i im`.
typedef struct SkComplex {
  double re;
  double im;
} SkComplex;

// Both sides of the balanced terminating summation and its residuals.
typedef struct SkFtResult {
  struct SkComplex lhs;
  struct SkComplex rhs;
  double residual;
  double condition;
  double termwise;
} SkFtResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failure on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *sk_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void sk_string_free(char *s);

// Library version string (static; do not free).
const char *sk_version(void);

// Creates a context for `tau = i tau_im` and `eta` (real, purely imaginary or zero).
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum SkStatus sk_context_new(double tau_im, struct SkComplex eta, struct SkContext **out);

// Releases a context. Null is ignored.
//
// # Safety
// `ctx` must come from [`sk_context_new`] and not have been freed already.
void sk_context_free(struct SkContext *ctx);

// Nome `p = e^{2 pi i tau}` of the context.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum SkStatus sk_context_nome(const struct SkContext *ctx, double *out);

// Odd Jacobi theta function `theta_1(x | tau)`.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum SkStatus sk_theta(const struct SkContext *ctx, struct SkComplex x, struct SkComplex *out);

// Elliptic number `[x] = theta_1(2 eta x)`.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum SkStatus sk_bracket(const struct SkContext *ctx, struct SkComplex x, struct SkComplex *out);

// Weight `M(u, v)` of the invariant metric on the order-`n` space.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum SkStatus sk_weight(const struct SkContext *ctx,
                        struct SkComplex u,
                        struct SkComplex v,
                        size_t n,
                        struct SkComplex *out);

// Normalization constant `C` of the reproducing kernel on the order-`n` space.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum SkStatus sk_constant_c(const struct SkContext *ctx, size_t n, struct SkComplex *out);

// Biorthogonality norm `Gamma_k(a1, a2)` on the order-`n` space.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum SkStatus sk_gamma_k(const struct SkContext *ctx,
                         struct SkComplex a1,
                         struct SkComplex a2,
                         size_t k,
                         size_t n,
                         struct SkComplex *out);

// Elliptic gamma function `Gamma(x; p, q)` with `0 < p < 1`, `0 < |q| < 1`.
//
// # Safety
// `out` must be a valid pointer.
enum SkStatus sk_elliptic_gamma(struct SkComplex x,
                                double p,
                                struct SkComplex q,
                                struct SkComplex *out);

// Balanced terminating summation for `a, b, c, d` and order `n`; the fifth
// parameter is fixed by the balancing condition.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum SkStatus sk_frenkel_turaev(const struct SkContext *ctx,
                                struct SkComplex a,
                                struct SkComplex b,
                                struct SkComplex c,
                                struct SkComplex d,
                                size_t n,
                                struct SkFtResult *out);

// Solves the change of basis `e_k^{(a,b)} = sum_l R_kl e_l^{(c,d)}` on the order-`n` space.
//
// # Safety
// `ctx` and `out` must be valid pointers.
enum SkStatus sk_sixj_new(const struct SkContext *ctx,
                          struct SkComplex a,
                          struct SkComplex b,
                          struct SkComplex c,
                          struct SkComplex d,
                          size_t n,
                          struct SkSixJTable **out);

// Releases a table. Null is ignored.
//
// # Safety
// `table` must come from [`sk_sixj_new`] and not have been freed already.
void sk_sixj_free(struct SkSixJTable *table);

// Order `n` of the table (entries are indexed `0..=n`).
//
// # Safety
// `table` and `out` must be valid pointers.
enum SkStatus sk_sixj_order(const struct SkSixJTable *table, size_t *out);

// Entry `R_kl`.
//
// # Safety
// `table` and `out` must be valid pointers.
enum SkStatus sk_sixj_get(const struct SkSixJTable *table,
                          size_t k,
                          size_t l,
                          struct SkComplex *out);

// Condition number of the solve and worst holdout residual.
//
// # Safety
// `table`, `cond` and `holdout` must be valid pointers.
enum SkStatus sk_sixj_diagnostics(const struct SkSixJTable *table, double *cond, double *holdout);

// Table as JSON; release with [`sk_string_free`].
//
// # Safety
// `table` and `out` must be valid pointers.
enum SkStatus sk_sixj_to_json(const struct SkSixJTable *table, char **out);

// Runs verification suites and returns the JSON report.
//
// `suites` is a comma-separated list (`"all"` for every suite); `eta_kind` is
// `"real"`, `"imaginary"` or `"zero"`. `all_passed` may be null.
//
// # Safety
// String arguments must be NUL-terminated; `out` must be a valid pointer.
enum SkStatus sk_verify_json(const char *suites,
                             double tau_im,
                             double eta,
                             const char *eta_kind,
                             size_t n,
                             size_t grid_m1,
                             size_t grid_m2,
                             uint64_t seed,
                             char **out,
                             bool *all_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKLYANIN_H */
