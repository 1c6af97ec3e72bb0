#include "core/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/nnls.hpp"
#include "core/threads.hpp"

namespace schedlaw {

namespace {

using json = nlohmann::json;

// R^2 with the zero-variance convention: a constant target fitted exactly
// scores 1.
double r_squared(const std::vector<double>& y,
                 const std::vector<double>& yhat) {
  const std::size_t n = y.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double sst = 0.0, sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sst += (y[i] - mean) * (y[i] - mean);
    sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  }
  if (sst <= 0.0) {
    const double tol = 1e-18 * static_cast<double>(n) * (1.0 + mean * mean);
    return sse <= tol ? 1.0 : 0.0;
  }
  return 1.0 - sse / sst;
}

}  // namespace

void validate(const LossTrace& trace) {
  if (trace.steps.empty()) throw validation_error("loss trace is empty");
  if (trace.losses.size() != trace.steps.size()) {
    throw validation_error("loss trace: steps and losses differ in length");
  }
  if (!trace.lrs.empty() && trace.lrs.size() != trace.steps.size()) {
    throw validation_error("loss trace: lr column length mismatch");
  }
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    if (trace.steps[i] < 1) {
      throw validation_error("loss trace: steps must be >= 1");
    }
    if (i > 0 && trace.steps[i] <= trace.steps[i - 1]) {
      throw validation_error("loss trace: steps must be strictly increasing");
    }
    if (!std::isfinite(trace.losses[i]) || trace.losses[i] < 0.0) {
      throw validation_error(
          "loss trace: losses must be finite and non-negative");
    }
    if (!trace.lrs.empty() &&
        (!std::isfinite(trace.lrs[i]) || trace.lrs[i] < 0.0)) {
      throw validation_error(
          "loss trace: rates must be finite and non-negative");
    }
  }
}

std::vector<DesignRow> build_design(const PrefixSums& pfx,
                                    const std::vector<std::int64_t>& taus) {
  std::vector<DesignRow> rows(taus.size());
  std::vector<std::string> failures(taus.size());
  parallel_for(static_cast<std::int64_t>(taus.size()), [&](std::int64_t i) {
    const std::int64_t tau = taus[static_cast<std::size_t>(i)];
    try {
      const double bracket = last_iterate_bracket(pfx, tau);
      const double x1 = 1.0 / (2.0 * pfx.s1(tau));
      const double x2 = 0.5 * bracket;
      if (!std::isfinite(x1) || !std::isfinite(x2)) {
        throw numeric_error("design row is not finite");
      }
      rows[static_cast<std::size_t>(i)] = DesignRow{tau, x1, x2};
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  });
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      throw numeric_error("design row at tau=" + std::to_string(taus[i]) +
                          ": " + failures[i]);
    }
  }
  return rows;
}

std::vector<double> smooth_losses(const std::vector<double>& losses,
                                  std::int64_t window) {
  if (window < 0) throw validation_error("smoothing window must be >= 0");
  const auto n = static_cast<std::int64_t>(losses.size());
  if (window <= 1 || n == 0) return losses;
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    prefix[static_cast<std::size_t>(i) + 1] =
        prefix[static_cast<std::size_t>(i)] +
        losses[static_cast<std::size_t>(i)];
  }
  const std::int64_t left = (window - 1) / 2;
  const std::int64_t right = window / 2;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t lo = std::max<std::int64_t>(0, i - left);
    const std::int64_t hi = std::min(n - 1, i + right);
    out[static_cast<std::size_t>(i)] =
        (prefix[static_cast<std::size_t>(hi) + 1] -
         prefix[static_cast<std::size_t>(lo)]) /
        static_cast<double>(hi - lo + 1);
  }
  return out;
}

namespace {

// Shared tail of nnls_fit / fit_predict: solve and fill the coefficient and
// fit-side fields.
void solve_into(FitReport& report, const std::vector<DesignRow>& rows,
                const std::vector<double>& targets) {
  std::vector<double> c1, c2, c3;
  c1.reserve(rows.size());
  c2.reserve(rows.size());
  c3.assign(rows.size(), 1.0);
  for (const DesignRow& r : rows) {
    if (!std::isfinite(r.x1) || r.x1 <= 0.0 || !std::isfinite(r.x2) ||
        r.x2 < 0.0) {
      throw validation_error("design rows must have x1 > 0 and x2 >= 0");
    }
    c1.push_back(r.x1);
    c2.push_back(r.x2);
  }
  const NnlsResult sol = nnls({c1, c2, c3}, targets);
  report.D_tilde = std::sqrt(sol.x[0]);
  report.G_tilde = std::sqrt(sol.x[1]);
  report.L_inf = sol.x[2];
  report.kkt_residual = sol.kkt_residual;
  report.collinearity_warning = sol.collinearity_warning;
}

double model_value(const FitReport& report, const DesignRow& row) {
  return report.L_inf + report.D_tilde * report.D_tilde * row.x1 +
         report.G_tilde * report.G_tilde * row.x2;
}

}  // namespace

FitReport nnls_fit(const std::vector<DesignRow>& rows,
                   const std::vector<double>& losses) {
  if (rows.size() != losses.size()) {
    throw validation_error("design rows and losses differ in length");
  }
  if (rows.size() < 3) {
    throw validation_error("need at least 3 design rows to fit");
  }
  for (double v : losses) {
    if (!std::isfinite(v)) {
      throw validation_error("fit targets must be finite");
    }
  }
  FitReport report;
  solve_into(report, rows, losses);
  std::vector<double> yhat(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    yhat[i] = model_value(report, rows[i]);
  }
  report.r2_fit = r_squared(losses, yhat);
  report.r2_fit_raw = report.r2_fit;
  report.r2_predict = std::numeric_limits<double>::quiet_NaN();
  report.r2_predict_raw = std::numeric_limits<double>::quiet_NaN();
  report.n_fit = static_cast<std::int64_t>(rows.size());
  report.fit_steps.reserve(rows.size());
  report.fit_residuals.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    report.fit_steps.push_back(rows[i].tau);
    report.fit_residuals.push_back(losses[i] - yhat[i]);
  }
  return report;
}

FitReport fit_predict(const LossTrace& trace,
                      const LearningRateSequence& schedule,
                      const FitOptions& opts) {
  validate(trace);
  if (!std::isfinite(opts.split_frac) || opts.split_frac <= 0.0 ||
      opts.split_frac >= 1.0) {
    throw validation_error("split_frac must lie strictly in (0, 1)");
  }
  if (opts.smoothing_window < 0) {
    throw validation_error("smoothing window must be >= 0");
  }
  if (opts.t_min < 0) throw validation_error("t_min must be >= 0");

  const bool positional = !trace.lrs.empty();
  LearningRateSequence rates;
  std::int64_t horizon = 0;
  if (positional) {
    rates = trace.lrs;
    horizon = trace.steps.back();
  } else {
    if (schedule.empty()) {
      throw validation_error(
          "trace has no lr column and no schedule was given");
    }
    rates = schedule;
    horizon = static_cast<std::int64_t>(schedule.size());
    if (trace.steps.back() > horizon) {
      throw validation_error("trace steps run past the schedule horizon");
    }
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    if (trace.steps[i] >= opts.t_min) kept.push_back(i);
  }
  if (kept.empty()) {
    throw validation_error("t_min removes every row of the trace");
  }

  std::vector<double> raw;
  std::vector<std::int64_t> labels, taus;
  raw.reserve(kept.size());
  labels.reserve(kept.size());
  taus.reserve(kept.size());
  for (std::size_t idx : kept) {
    raw.push_back(trace.losses[idx]);
    labels.push_back(trace.steps[idx]);
    taus.push_back(positional ? static_cast<std::int64_t>(idx) + 1
                              : trace.steps[idx]);
  }

  const std::int64_t window =
      opts.smoothing_window > 0
          ? opts.smoothing_window
          : std::max<std::int64_t>(
                1, static_cast<std::int64_t>(kept.size()) / 200);
  const std::vector<double> smoothed = smooth_losses(raw, window);

  const double split_at = opts.split_frac * static_cast<double>(horizon);
  std::vector<std::size_t> fit_idx, pred_idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (static_cast<double>(labels[i]) <= split_at ? fit_idx : pred_idx)
        .push_back(i);
  }
  if (fit_idx.size() < 3) {
    throw validation_error(
        "fit segment has fewer than 3 points; widen the split");
  }
  if (pred_idx.size() < 3) {
    throw validation_error("split leaves fewer than 3 held-out points");
  }

  const PrefixSums pfx(rates);
  const std::vector<DesignRow> rows = build_design(pfx, taus);

  std::vector<DesignRow> fit_rows;
  std::vector<double> fit_smoothed, fit_raw;
  for (std::size_t i : fit_idx) {
    fit_rows.push_back(rows[i]);
    fit_smoothed.push_back(smoothed[i]);
    fit_raw.push_back(raw[i]);
  }

  FitReport report;
  solve_into(report, fit_rows, fit_smoothed);
  report.split_step = static_cast<std::int64_t>(std::floor(split_at));
  report.smoothing_window = window;
  report.n_fit = static_cast<std::int64_t>(fit_idx.size());
  report.n_predict = static_cast<std::int64_t>(pred_idx.size());

  std::vector<double> yhat_fit(fit_rows.size());
  for (std::size_t i = 0; i < fit_rows.size(); ++i) {
    yhat_fit[i] = model_value(report, fit_rows[i]);
    report.fit_steps.push_back(labels[fit_idx[i]]);
    report.fit_residuals.push_back(fit_smoothed[i] - yhat_fit[i]);
  }
  report.r2_fit = r_squared(fit_smoothed, yhat_fit);
  report.r2_fit_raw = r_squared(fit_raw, yhat_fit);

  std::vector<double> pred_smoothed, pred_raw, yhat_pred;
  for (std::size_t i : pred_idx) {
    pred_smoothed.push_back(smoothed[i]);
    pred_raw.push_back(raw[i]);
    yhat_pred.push_back(model_value(report, rows[i]));
  }
  report.r2_predict = r_squared(pred_smoothed, yhat_pred);
  report.r2_predict_raw = r_squared(pred_raw, yhat_pred);
  return report;
}

std::string fit_report_to_json(const FitReport& report) {
  json j;
  j["L_inf"] = report.L_inf;
  j["D_tilde"] = report.D_tilde;
  j["G_tilde"] = report.G_tilde;
  j["r2_fit"] = report.r2_fit;
  j["r2_fit_raw"] = report.r2_fit_raw;
  j["r2_predict"] = report.r2_predict;
  j["r2_predict_raw"] = report.r2_predict_raw;
  j["kkt_residual"] = report.kkt_residual;
  j["collinearity_warning"] = report.collinearity_warning;
  j["split_step"] = report.split_step;
  j["smoothing_window"] = report.smoothing_window;
  j["n_fit"] = report.n_fit;
  j["n_predict"] = report.n_predict;
  j["fit_steps"] = report.fit_steps;
  j["fit_residuals"] = report.fit_residuals;
  return j.dump(2);
}

}  // namespace schedlaw
