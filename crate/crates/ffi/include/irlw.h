#ifndef IRLW_H
#define IRLW_H

/* Generated by cbindgen from the irlw-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum IrlwStatus {
  IRLW_STATUS_OK = 0,
  IRLW_STATUS_NULL_POINTER = 1,
  IRLW_STATUS_INVALID_ARGUMENT = 2,
  IRLW_STATUS_INFEASIBLE = 3,
  IRLW_STATUS_DIMENSION_MISMATCH = 4,
  IRLW_STATUS_STRUCTURE_ERROR = 5,
  IRLW_STATUS_SAMPLING_ERROR = 6,
  IRLW_STATUS_CONFIG_ERROR = 7,
  IRLW_STATUS_UNAVAILABLE = 8,
  IRLW_STATUS_PANIC = 9,
} IrlwStatus;

// Opaque forward-problem handle.
typedef struct IrlwProblem IrlwProblem;

// Opaque iteration-trace handle.
typedef struct IrlwTrace IrlwTrace;

// Declared problem constants mirrored into C.
typedef struct IrlwProblemConstants {
  double lipschitz_l;
  double deriv_bound_lhat;
  double stability_cf;
  double stability_eps;
} IrlwProblemConstants;

// Solver options mirrored into C. Nonpositive `mu` means "auto"
// (0.9 x the admissible supremum); nonpositive `rho_sq` means "use the
// closed-form radius".
typedef struct IrlwSolverOptions {
  double mu;
  double rho_sq;
  // 0 = standard (shifted), 1 = unshifted variant.
  int32_t variant;
  // 0 = zero, 1 = power, 2 = geometric, 3 = adaptive.
  int32_t schedule;
  double beta_base;
  // Power exponent or geometric/adaptive ratio.
  double beta_decay;
  double beta_max;
  double smoothness_c;
  size_t max_iterations;
  double residual_tolerance;
  double gamma_tolerance;
  bool allow_mu_override;
} IrlwSolverOptions;

// One trace row mirrored into C; absent optional fields are NaN
// (`in_ball` is -1 when unknown).
typedef struct IrlwTraceRow {
  size_t k;
  double beta;
  double gamma;
  double residual;
  double err_norm;
  int32_t in_ball;
  double alpha;
  double bound_rhs;
} IrlwTraceRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *irlw_status_message(enum IrlwStatus status);

// Library version string (static, do not free).
const char *irlw_version(void);

// Diagonal linear problem `F(u)_i = s_i u_i`.
//
// `ground_truth` may be null (defaults to 0.1 per coordinate); otherwise it
// must hold `len` values.
//
// # Safety
// `singular_values` must point to `len` readable doubles, `ground_truth` to
// `len` doubles when non-null.
enum IrlwStatus irlw_problem_diagonal(const double *singular_values,
                                      size_t len,
                                      const double *ground_truth,
                                      struct IrlwProblem **out);

// Componentwise monomial problem `F(u)_i = |u_i|^{m-1} u_i`, `m` in (1, 2].
//
// # Safety
// `out` must be a valid out-pointer.
enum IrlwStatus irlw_problem_monomial(size_t dimension, double m, struct IrlwProblem **out);

// Resistor-network DtN problem. `edge_endpoints` holds `2 * n_edges` node
// indices (pairs), `conductances` holds `n_edges` positive values.
//
// # Safety
// The two arrays must cover the stated number of elements.
enum IrlwStatus irlw_problem_resistor(size_t boundary_nodes,
                                      size_t interior_nodes,
                                      const size_t *edge_endpoints,
                                      const double *conductances,
                                      size_t n_edges,
                                      struct IrlwProblem **out);

// Build a problem from the text of an experiment config (the same format
// the CLI reads).
//
// # Safety
// `text` must be a NUL-terminated UTF-8 string.
enum IrlwStatus irlw_problem_from_config(const char *text, struct IrlwProblem **out);

// # Safety
// `problem` must be a handle from a constructor, not yet freed.
void irlw_problem_free(struct IrlwProblem *problem);

// Model-space dimension (number of unknowns). Null handles give 0.
//
// # Safety
// `problem` must be live or null.
size_t irlw_problem_dimension(const struct IrlwProblem *problem);

// Data-space dimension (length of `F(u)`). Null handles give 0.
//
// # Safety
// `problem` must be live or null.
size_t irlw_problem_range_dimension(const struct IrlwProblem *problem);

// Evaluate `F(u)`; `u` has the model-space dimension, `out` the data-space
// dimension.
//
// # Safety
// Array lengths per the dimension accessors.
enum IrlwStatus irlw_problem_apply(const struct IrlwProblem *problem, const double *u, double *out);

// Copy of the ground truth, when the problem has one.
//
// # Safety
// `out` must hold the model-space dimension.
enum IrlwStatus irlw_problem_ground_truth(const struct IrlwProblem *problem, double *out);

// Declared `(L, Lhat, C_F, eps)` of the problem.
//
// # Safety
// `out` must be a valid pointer.
enum IrlwStatus irlw_problem_constants(const struct IrlwProblem *problem,
                                       struct IrlwProblemConstants *out);

// Mode-appropriate admissible step-size supremum for the problem.
//
// # Safety
// `out` must be a valid pointer.
enum IrlwStatus irlw_admissible_mu(const struct IrlwProblem *problem, double *out);

// The gauge constant `kappa_p` (requires `p > 1`).
//
// # Safety
// `out` must be a valid pointer.
enum IrlwStatus irlw_kappa_p(double p, double *out);

// Defaults: auto step size, closed-form radius, zero schedule, 10^4
// iteration cap, gamma tolerance 1e-9.
//
// # Safety
// `out` must be a valid pointer.
enum IrlwStatus irlw_solver_options_default(struct IrlwSolverOptions *out);

// Run the iteration. `u0` may be null (zero initial guess); otherwise it
// must hold the model-space dimension.
//
// # Safety
// Array lengths per the dimension accessors; `options` and `out` valid.
enum IrlwStatus irlw_solve(const struct IrlwProblem *problem,
                           const struct IrlwSolverOptions *options,
                           const double *u0,
                           struct IrlwTrace **out);

// # Safety
// `trace` must be a handle from `irlw_solve`, not yet freed.
void irlw_trace_free(struct IrlwTrace *trace);

// Number of recorded iterations (rows). Null handles give 0.
//
// # Safety
// `trace` must be live or null.
size_t irlw_trace_len(const struct IrlwTrace *trace);

// Terminal status: 0 residual converged, 1 gamma converged,
// 2 iteration cap, 3 left the ball, -1 for a null handle.
//
// # Safety
// `trace` must be live or null.
int32_t irlw_trace_status(const struct IrlwTrace *trace);

// Copy row `k` of the trace.
//
// # Safety
// `out` must be a valid pointer.
enum IrlwStatus irlw_trace_row(const struct IrlwTrace *trace, size_t k, struct IrlwTraceRow *out);

// Minimum recursion-bound slack over the trace (needs the run's rate
// constants; `IRLW_STATUS_UNAVAILABLE` otherwise).
//
// # Safety
// `out` must be a valid pointer.
enum IrlwStatus irlw_trace_min_recursion_slack(const struct IrlwTrace *trace, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* IRLW_H */
