#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/bound.hpp"
#include "core/schedule.hpp"

namespace schedlaw {

// A recorded training curve. `lrs` is optional: when present, each row
// carries the rate that produced it and rows are treated as consecutive
// steps; when absent, the step labels index into a full schedule supplied
// separately.
struct LossTrace {
  std::vector<std::int64_t> steps;  // strictly increasing, >= 1
  std::vector<double> losses;      // finite, >= 0
  std::vector<double> lrs;         // optional per-row rates
};

void validate(const LossTrace& trace);

struct DesignRow {
  std::int64_t tau = 0;
  double x1 = 0.0;  // 1/(2 S1(tau))
  double x2 = 0.0;  // half the single-iterate bracket at tau
};

// Rows satisfy L* + D^2 x1 + G^2 x2 == single-iterate bound exactly.
std::vector<DesignRow> build_design(const PrefixSums& pfx,
                                    const std::vector<std::int64_t>& taus);

struct FitOptions {
  double split_frac = 0.5;            // fit on steps <= split_frac * horizon
  std::int64_t smoothing_window = 0;  // 0 = auto, max(1, n/200)
  std::int64_t t_min = 0;             // drop steps below this first
};

struct FitReport {
  double L_inf = 0.0;
  double D_tilde = 0.0;
  double G_tilde = 0.0;
  double r2_fit = 0.0;      // smoothed losses, fit segment
  double r2_fit_raw = 0.0;  // raw losses, fit segment
  double r2_predict = 0.0;  // smoothed losses, held-out segment
  double r2_predict_raw = 0.0;
  double kkt_residual = 0.0;
  bool collinearity_warning = false;
  std::int64_t split_step = 0;
  std::int64_t smoothing_window = 1;
  std::int64_t n_fit = 0;
  std::int64_t n_predict = 0;
  std::vector<std::int64_t> fit_steps;
  std::vector<double> fit_residuals;  // smoothed loss minus model
};

// Recovers (L_inf, D~, G~) from rows by nonnegative least squares on the
// columns [x1, x2, 1]; the squares of D~ and G~ are the fitted weights.
FitReport nnls_fit(const std::vector<DesignRow>& rows,
                   const std::vector<double>& losses);

// Full pipeline: drop early steps, smooth, split at split_frac of the
// horizon, fit the early segment, score the held-out one. `schedule` is
// consulted only when the trace has no lr column.
FitReport fit_predict(const LossTrace& trace,
                      const LearningRateSequence& schedule,
                      const FitOptions& opts);

// Centered moving average; window <= 1 is the identity.
std::vector<double> smooth_losses(const std::vector<double>& losses,
                                  std::int64_t window);

std::string fit_report_to_json(const FitReport& report);

}  // namespace schedlaw
