#include "core/scaling.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/nnls.hpp"

namespace schedlaw {

namespace {

using json = nlohmann::json;

double check_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw validation_error(std::string(name) + " must be finite and > 0");
  }
  return v;
}

}  // namespace

std::string to_string(HorizonUnit unit) {
  return unit == HorizonUnit::Steps ? "steps" : "tokens";
}

HorizonUnit horizon_unit_from_string(const std::string& name) {
  if (name == "steps") return HorizonUnit::Steps;
  if (name == "tokens") return HorizonUnit::Tokens;
  throw validation_error("unknown horizon unit '" + name +
                         "' (expected 'steps' or 'tokens')");
}

void validate(const RunRecord& record) {
  check_positive(record.eta_ref, "RunRecord.eta_ref");
  check_positive(record.horizon, "RunRecord.horizon");
  if (!std::isfinite(record.final_loss) || record.final_loss < 0.0) {
    throw validation_error("RunRecord.final_loss must be finite and >= 0");
  }
  if (record.batch_size != 0.0) check_positive(record.batch_size, "RunRecord.batch_size");
  if (record.model_size != 0.0) check_positive(record.model_size, "RunRecord.model_size");
}

LineFit fit_sqrtT_line(const std::vector<RunRecord>& records,
                       std::int64_t T_min_cutoff) {
  if (T_min_cutoff < 1) {
    throw validation_error("T_min_cutoff must be >= 1");
  }
  std::vector<double> xs, ys;
  std::vector<double> horizons;
  LineFit fit;
  for (const RunRecord& r : records) {
    validate(r);
    if (r.unit != records.front().unit) {
      throw validation_error(
          "records mix horizon units; fit steps and tokens separately");
    }
    if (r.horizon < static_cast<double>(T_min_cutoff)) {
      ++fit.points_excluded;
      continue;
    }
    xs.push_back(1.0 / std::sqrt(r.horizon));
    ys.push_back(r.final_loss);
    horizons.push_back(r.horizon);
  }
  std::vector<double> distinct = horizons;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 3) {
    throw insufficient_data_error(
        "insufficient data: need at least 3 records with distinct horizons "
        "at or above the cutoff");
  }
  fit.points_used = static_cast<std::int64_t>(xs.size());

  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.Q = sxy / sxx;
  fit.L_inf = my - fit.Q * mx;
  if (fit.L_inf < 0.0) {
    // Losses are non-negative; pin the intercept and refit through origin.
    fit.L_inf = 0.0;
    double sxy0 = 0.0, sxx0 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy0 += xs[i] * ys[i];
      sxx0 += xs[i] * xs[i];
    }
    fit.Q = sxy0 / sxx0;
  }
  if (fit.Q < 0.0) {
    fit.Q = 0.0;
    fit.L_inf = my;
  }
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pred = fit.L_inf + fit.Q * xs[i];
    sse += (ys[i] - pred) * (ys[i] - pred);
    sst += (ys[i] - my) * (ys[i] - my);
  }
  fit.r2 = sst <= 0.0 ? (sse <= 0.0 ? 1.0 : 0.0) : 1.0 - sse / sst;
  return fit;
}

double q_curve(double q1, double q2, double eta_ref) {
  check_positive(q1, "q1");
  check_positive(q2, "q2");
  check_positive(eta_ref, "eta_ref");
  return q1 * q1 / eta_ref + eta_ref * q2 * q2;
}

QCurve fit_q_curve(const std::vector<double>& etas,
                   const std::vector<double>& Qs) {
  if (etas.size() != Qs.size()) {
    throw validation_error("eta and Q sample lengths differ");
  }
  std::vector<double> distinct = etas;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 3) {
    throw validation_error(
        "interpolation needs at least 3 distinct eta_ref values");
  }
  for (std::size_t i = 0; i < etas.size(); ++i) {
    check_positive(etas[i], "eta_ref sample");
    check_positive(Qs[i], "Q sample");
  }

  // Linear init: Q*eta = q1^2 + q2^2 * eta^2 with nonnegative weights.
  const std::size_t m = etas.size();
  std::vector<double> ones(m, 1.0), eta2(m), target(m);
  for (std::size_t i = 0; i < m; ++i) {
    eta2[i] = etas[i] * etas[i];
    target[i] = Qs[i] * etas[i];
  }
  const NnlsResult init = nnls({ones, eta2}, target);
  double scale = 0.0;
  for (double t : target) scale += t;
  scale /= static_cast<double>(m);
  double u = std::max(init.x[0], 1e-12 * scale);
  double v = std::max(init.x[1], 1e-12 * scale);

  // Gauss-Newton on log residuals in (log u, log v); multiplicative updates
  // keep both parameters positive.
  for (int iter = 0; iter < 100; ++iter) {
    double j11 = 0.0, j12 = 0.0, j22 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double model = u / etas[i] + v * etas[i];
      const double resid = std::log(model) - std::log(Qs[i]);
      const double du = (u / etas[i]) / model;  // d resid / d log u
      const double dv = (v * etas[i]) / model;  // d resid / d log v
      j11 += du * du;
      j12 += du * dv;
      j22 += dv * dv;
      g1 += du * resid;
      g2 += dv * resid;
    }
    const double det = j11 * j22 - j12 * j12;
    if (std::fabs(det) < 1e-30) break;
    const double step_u = (j22 * g1 - j12 * g2) / det;
    const double step_v = (j11 * g2 - j12 * g1) / det;
    u *= std::exp(-step_u);
    v *= std::exp(-step_v);
    if (std::fabs(step_u) + std::fabs(step_v) < 1e-14) break;
  }
  QCurve curve;
  curve.q1 = std::sqrt(u);
  curve.q2 = std::sqrt(v);
  return curve;
}

Selection select_eta_ref(const std::map<double, LineFit>& fits,
                         bool interpolate) {
  if (fits.size() < 2) {
    throw validation_error("selection needs at least 2 eta_ref entries");
  }
  Selection sel;
  if (!interpolate) {
    // std::map iterates in ascending key order, so the first strict minimum
    // breaks ties toward the smaller eta_ref.
    bool first = true;
    for (const auto& [eta, fit] : fits) {
      if (first || fit.Q < sel.Q_star) {
        sel.eta_ref_star = eta;
        sel.Q_star = fit.Q;
        first = false;
      }
    }
    return sel;
  }
  std::vector<double> etas, Qs;
  for (const auto& [eta, fit] : fits) {
    etas.push_back(eta);
    Qs.push_back(fit.Q);
  }
  sel.curve = fit_q_curve(etas, Qs);
  sel.eta_ref_star = sel.curve.q1 / sel.curve.q2;
  sel.Q_star = 2.0 * sel.curve.q1 * sel.curve.q2;
  sel.interpolated = true;
  return sel;
}

ScalingFit scaling_fit(const std::vector<RunRecord>& records,
                       std::int64_t T_min_cutoff, bool interpolate) {
  if (records.empty()) throw validation_error("no records given");
  std::map<double, std::vector<RunRecord>> groups;
  for (const RunRecord& r : records) {
    validate(r);
    if (r.unit != records.front().unit) {
      throw validation_error(
          "records mix horizon units; fit steps and tokens separately");
    }
    groups[r.eta_ref].push_back(r);
  }
  ScalingFit fit;
  fit.T_min_cutoff = T_min_cutoff;
  fit.unit = records.front().unit;
  for (const RunRecord& r : records) {
    if (r.horizon < static_cast<double>(T_min_cutoff)) continue;
    if (fit.horizon_min == 0.0 || r.horizon < fit.horizon_min) {
      fit.horizon_min = r.horizon;
    }
    fit.horizon_max = std::max(fit.horizon_max, r.horizon);
  }
  for (const auto& [eta, group] : groups) {
    fit.per_eta_ref[eta] = fit_sqrtT_line(group, T_min_cutoff);
  }
  const Selection sel = select_eta_ref(fit.per_eta_ref, interpolate);
  fit.eta_ref_star = sel.eta_ref_star;
  fit.Q_star = sel.Q_star;
  fit.interpolated = sel.interpolated;
  fit.curve = sel.curve;
  if (!interpolate) {
    fit.L_inf_star = fit.per_eta_ref.at(fit.eta_ref_star).L_inf;
  } else {
    // Intercept from the grid eta_ref nearest the interpolated optimum in
    // log scale; ties toward the smaller rate.
    double best_dist = 0.0;
    bool first = true;
    for (const auto& [eta, line] : fit.per_eta_ref) {
      const double dist = std::fabs(std::log(eta / fit.eta_ref_star));
      if (first || dist < best_dist) {
        best_dist = dist;
        fit.L_inf_star = line.L_inf;
        first = false;
      }
    }
  }
  return fit;
}

TransferResult transfer_lr(double eta_peak_small, double T_small,
                           double T_target) {
  check_positive(eta_peak_small, "eta_peak_small");
  check_positive(T_small, "T_small");
  check_positive(T_target, "T_target");
  TransferResult out;
  out.eta_peak = eta_peak_small / std::sqrt(T_target / T_small);
  out.extrapolation_warning = T_target < T_small;
  return out;
}

double flops_to_tokens(double flops, double model_size) {
  check_positive(flops, "flops");
  check_positive(model_size, "model_size");
  return flops / (6.0 * model_size);
}

double tokens_to_steps(double tokens, double batch_size) {
  check_positive(tokens, "tokens");
  check_positive(batch_size, "batch_size");
  return tokens / batch_size;
}

double predict_loss(const ScalingFit& fit, double T_target) {
  if (!std::isfinite(T_target) || T_target < 1.0) {
    throw validation_error("prediction horizon must be >= 1");
  }
  return fit.L_inf_star + fit.Q_star / std::sqrt(T_target);
}

std::string scaling_fit_to_json(const ScalingFit& fit) {
  json per = json::array();
  for (const auto& [eta, line] : fit.per_eta_ref) {
    json entry;
    entry["eta_ref"] = eta;
    entry["L_inf"] = line.L_inf;
    entry["Q"] = line.Q;
    entry["r2"] = line.r2;
    entry["points_used"] = line.points_used;
    entry["points_excluded"] = line.points_excluded;
    per.push_back(entry);
  }
  json j;
  j["per_eta_ref"] = per;
  j["eta_ref_star"] = fit.eta_ref_star;
  j["Q_star"] = fit.Q_star;
  j["L_inf_star"] = fit.L_inf_star;
  j["T_min_cutoff"] = fit.T_min_cutoff;
  j["unit"] = to_string(fit.unit);
  j["interpolated"] = fit.interpolated;
  j["horizon_min"] = fit.horizon_min;
  j["horizon_max"] = fit.horizon_max;
  if (fit.interpolated) {
    j["q_curve"]["q1"] = fit.curve.q1;
    j["q_curve"]["q2"] = fit.curve.q2;
  }
  return j.dump(2);
}

}  // namespace schedlaw
