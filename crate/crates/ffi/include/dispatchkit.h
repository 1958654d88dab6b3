#ifndef DISPATCHKIT_H
#define DISPATCHKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DkBoundStatus {
  DK_BOUND_STATUS_AT_LOWER = 0,
  DK_BOUND_STATUS_INTERIOR = 1,
  DK_BOUND_STATUS_AT_UPPER = 2,
} DkBoundStatus;

typedef enum DkMode {
  DK_MODE_COST = 0,
  DK_MODE_RESILIENCE = 1,
  DK_MODE_MULTI = 2,
} DkMode;

typedef enum DkRegime {
  DK_REGIME_BELOW_MINIMUM = 0,
  DK_REGIME_EQUALITY_FEASIBLE = 1,
  DK_REGIME_DEFICIT = 2,
} DkRegime;

typedef enum DkStatus {
  DK_STATUS_OK = 0,
  DK_STATUS_PARSE_ERROR = 1,
  DK_STATUS_INFEASIBLE = 2,
  DK_STATUS_NUMERICAL = 3,
  DK_STATUS_INVALID_ARGUMENT = 4,
  DK_STATUS_NULL_POINTER = 5,
  DK_STATUS_PANIC = 6,
} DkStatus;

// Opaque problem handle.
typedef struct DkProblem DkProblem;

// Opaque solution handle.
typedef struct DkSolution DkSolution;

// One customer for `dk_problem_new`. `id` is a NUL-terminated UTF-8 string.
typedef struct DkCustomerSpec {
  const char *id;
  double p_min_kw;
  double p_max_kw;
  double c0;
  double c1;
  double c2;
} DkCustomerSpec;

typedef struct DkRegimeReport {
  enum DkRegime regime;
  double capacity_min;
  double capacity_max;
  double demand_e;
} DkRegimeReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next call into this library on the same thread.
const char *dk_last_error_message(void);

// Builds a problem from `n` customer specs.
//
// # Safety
// `customers` must point to `n` valid specs whose `id` fields are valid
// NUL-terminated strings; `out` must be a valid pointer.
enum DkStatus dk_problem_new(const struct DkCustomerSpec *customers,
                             uintptr_t n,
                             double horizon_t_h,
                             double demand_e_kwh,
                             double lambda,
                             struct DkProblem **out);

// Parses a TOML problem document.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` a valid pointer.
enum DkStatus dk_problem_from_toml(const char *text, struct DkProblem **out);

// The bundled five-customer reference fleet (700 kWh, λ = 0.5, T = 1 h).
//
// # Safety
// `out` must be a valid pointer.
enum DkStatus dk_problem_reference_fleet(struct DkProblem **out);

// # Safety
// `problem` must be NULL or a handle from this library not yet freed.
void dk_problem_free(struct DkProblem *problem);

// # Safety
// `problem` must be a live handle.
uintptr_t dk_problem_len(const struct DkProblem *problem);

// # Safety
// `problem` must be a live handle.
enum DkStatus dk_problem_set_demand(struct DkProblem *problem, double demand_e_kwh);

// # Safety
// `problem` must be a live handle.
enum DkStatus dk_problem_set_lambda(struct DkProblem *problem, double lambda);

// # Safety
// `problem` must be a live handle and `out` a valid pointer.
enum DkStatus dk_classify(const struct DkProblem *problem, struct DkRegimeReport *out);

// Solves with default solver settings; `bisection_tol <= 0` keeps the default tolerance.
//
// # Safety
// `problem` must be a live handle and `out` a valid pointer.
enum DkStatus dk_solve(const struct DkProblem *problem,
                       enum DkMode mode,
                       double bisection_tol,
                       struct DkSolution **out);

// # Safety
// `solution` must be NULL or a handle from this library not yet freed.
void dk_solution_free(struct DkSolution *solution);

// # Safety
// `solution` must be a live handle.
uintptr_t dk_solution_len(const struct DkSolution *solution);

// Copies per-customer energies (kWh) into `buf`, which holds `len` values.
// `len` must equal `dk_solution_len`.
//
// # Safety
// `solution` must be a live handle and `buf` valid for `len` writes.
enum DkStatus dk_solution_energies(const struct DkSolution *solution, double *buf, uintptr_t len);

// Copies per-customer bound statuses into `buf`, which holds `len` entries.
//
// # Safety
// `solution` must be a live handle and `buf` valid for `len` writes.
enum DkStatus dk_solution_bound_status(const struct DkSolution *solution,
                                       enum DkBoundStatus *buf,
                                       uintptr_t len);

// # Safety
// `solution` must be a live handle. Returns NaN for NULL.
double dk_solution_total_energy(const struct DkSolution *solution);

// # Safety
// `solution` must be a live handle. Returns NaN for NULL.
double dk_solution_total_cost(const struct DkSolution *solution);

// # Safety
// `solution` must be a live handle. Returns NaN for NULL.
double dk_solution_coupling_multiplier(const struct DkSolution *solution);

// # Safety
// `solution` must be a live handle. Returns NaN for NULL.
double dk_solution_kkt_residual(const struct DkSolution *solution);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DISPATCHKIT_H */
