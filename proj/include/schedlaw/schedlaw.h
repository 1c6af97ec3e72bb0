/* schedlaw: convergence bounds, schedule exams, trace fits, and scaling laws
 * for learning-rate schedules. C interface to the shared library.
 *
 * Conventions: functions return SCHEDLAW_OK or a status code;
 * schedlaw_last_error() describes the most recent failure on this thread.
 * Strings returned through char** are malloc'd; release them with
 * schedlaw_string_free. Handles are released with their matching _free.
 */
#ifndef SCHEDLAW_H
#define SCHEDLAW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SCHEDLAW_OK = 0,
  SCHEDLAW_ERR_INVALID_ARGUMENT = 1, /* bad fields, malformed files */
  SCHEDLAW_ERR_NUMERIC = 2,          /* singularities, degenerate optima */
  SCHEDLAW_ERR_INSUFFICIENT_DATA = 3,
  SCHEDLAW_ERR_INTERNAL = 4
} schedlaw_status;

const char* schedlaw_version(void);

/* Message for the last failing call on this thread; never NULL. */
const char* schedlaw_last_error(void);

void schedlaw_string_free(char* s);

/* ---------- schedules ---------- */

typedef struct schedlaw_schedule schedlaw_schedule;

/* JSON object {"kind", "eta_peak", "T"} plus optional "c" (wsd),
 * "warmup_frac", "cycles" (cyclic). Unknown keys are rejected. */
schedlaw_status schedlaw_schedule_from_json(const char* json,
                                            schedlaw_schedule** out);
void schedlaw_schedule_free(schedlaw_schedule* schedule);
schedlaw_status schedlaw_schedule_to_json(const schedlaw_schedule* schedule,
                                          char** out);
int64_t schedlaw_schedule_horizon(const schedlaw_schedule* schedule);
/* Fills out[0..T-1] with the per-step rates; out must hold horizon doubles. */
schedlaw_status schedlaw_schedule_rates(const schedlaw_schedule* schedule,
                                        double* out);
/* CSV `step,lr`. */
schedlaw_status schedlaw_schedule_rates_csv(const schedlaw_schedule* schedule,
                                            char** out);

/* ---------- bounds ---------- */

/* Geometric grid of at most `points` distinct integers in [1, T]; *out_len
 * receives the count. out must hold `points` entries. */
schedlaw_status schedlaw_log_tau_grid(int64_t T, int64_t points, int64_t* out,
                                      size_t* out_len);

typedef struct schedlaw_bound_trace schedlaw_bound_trace;

/* kind is "last" or "averaged". The tau grid must be strictly increasing
 * within [1, T]. */
schedlaw_status schedlaw_bound_trace_compute(
    const schedlaw_schedule* schedule, double L_star, double D, double G,
    const char* kind, const int64_t* tau_grid, size_t grid_len,
    schedlaw_bound_trace** out);
void schedlaw_bound_trace_free(schedlaw_bound_trace* trace);
size_t schedlaw_bound_trace_size(const schedlaw_bound_trace* trace);
schedlaw_status schedlaw_bound_trace_values(const schedlaw_bound_trace* trace,
                                            int64_t* taus, double* values);
/* CSV `tau,bound`. */
schedlaw_status schedlaw_bound_trace_csv(const schedlaw_bound_trace* trace,
                                         char** out);

/* Closed-form bound and its minimizing peak rate for the named kind
 * (cyclic has none). wsd_c is ignored unless kind is "wsd". */
schedlaw_status schedlaw_closed_form_bound(const char* kind, double L_star,
                                           double D, double G, double eta_peak,
                                           double T, double wsd_c,
                                           double* out);
schedlaw_status schedlaw_optimal_peak_lr(const char* kind, double L_star,
                                         double D, double G, double T,
                                         double wsd_c, double* eta_star,
                                         double* bound_star, char** formula);

/* ---------- qualifying exam ---------- */

/* T_grid may be NULL to use the default horizons 1e3..1e7. Returns the full
 * exam report as JSON; *out_qualified gets 1/0. */
schedlaw_status schedlaw_qualify(const char* kind, double wsd_c,
                                 double warmup_frac, int64_t cycles,
                                 const int64_t* T_grid, size_t grid_len,
                                 double delta, double D, double G,
                                 int* out_qualified, char** out_json);

/* ---------- trace fitting ---------- */

/* trace_csv: `step,loss` or `step,loss,lr`. schedule may be NULL when the
 * trace carries its own lr column. split_frac in (0,1); smoothing_window 0
 * picks the default; t_min drops earlier steps. Returns the fit report as
 * JSON. */
schedlaw_status schedlaw_fit_trace(const char* trace_csv,
                                   const schedlaw_schedule* schedule,
                                   double split_frac, int64_t smoothing_window,
                                   int64_t t_min, char** out_json);

/* ---------- scaling law ---------- */

typedef struct schedlaw_scaling schedlaw_scaling;

/* records_csv: `eta_ref,T_or_tokens,unit,final_loss[,batch_size][,model_size]`.
 * t_min_cutoff <= 0 selects the default (2501). interpolate != 0 fits the
 * two-parameter Q curve instead of taking the grid argmin. */
schedlaw_status schedlaw_scaling_fit_records(const char* records_csv,
                                             int64_t t_min_cutoff,
                                             int interpolate,
                                             schedlaw_scaling** out);
void schedlaw_scaling_free(schedlaw_scaling* fit);
schedlaw_status schedlaw_scaling_to_json(const schedlaw_scaling* fit,
                                         char** out);
schedlaw_status schedlaw_scaling_predict(const schedlaw_scaling* fit,
                                         double T_target, double* out);
/* CSV `T,predicted_loss` over the given horizons. */
schedlaw_status schedlaw_scaling_prediction_csv(const schedlaw_scaling* fit,
                                                const double* horizons,
                                                size_t n, char** out);

/* eta_small / sqrt(T_target / T_small); *out_warning flags downward
 * transfers (computed anyway). */
schedlaw_status schedlaw_transfer_lr(double eta_peak_small, double T_small,
                                     double T_target, double* out_eta,
                                     int* out_warning);
schedlaw_status schedlaw_flops_to_tokens(double flops, double model_size,
                                         double* out);
schedlaw_status schedlaw_tokens_to_steps(double tokens, double batch_size,
                                         double* out);

/* ---------- convex simulator ---------- */

typedef struct schedlaw_sim schedlaw_sim;

/* problem_kind: "l1_distance", "huber_quadratic", or "piecewise_linear_max".
 * Runs `seeds` independent runs with seeds seed_base..seed_base+seeds-1,
 * recording on the given step grid. */
schedlaw_status schedlaw_sim_run(const char* problem_kind, int64_t d, double D,
                                 double G, double noise_scale,
                                 const schedlaw_schedule* schedule,
                                 uint64_t seed_base, int64_t seeds,
                                 const int64_t* record_grid, size_t grid_len,
                                 schedlaw_sim** out);
void schedlaw_sim_free(schedlaw_sim* sim);
/* iterate: "last" or "averaged". Seed-mean losses as CSV; with include_lr,
 * a third `lr` column carries the schedule rate at each recorded step. */
schedlaw_status schedlaw_sim_mean_trace_csv(const schedlaw_sim* sim,
                                            const char* iterate,
                                            int include_lr, char** out);
/* Problem constants, per-step means and standard errors, clipping counters. */
schedlaw_status schedlaw_sim_summary_json(const schedlaw_sim* sim, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SCHEDLAW_H */
