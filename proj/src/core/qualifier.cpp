#include "core/qualifier.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "core/continuous.hpp"
#include "core/errors.hpp"

namespace schedlaw {

namespace {

using json = nlohmann::json;

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
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
    const double dx = xs[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ys[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

std::string to_string(Verdict v) {
  return v == Verdict::Qualified ? "qualified" : "not_qualified";
}

std::vector<std::int64_t> default_exam_grid() {
  return {1000, 10000, 100000, 1000000, 10000000};
}

QualifyReport qualify(const ScheduleFamily& family,
                      const std::vector<std::int64_t>& T_grid, double delta,
                      double D, double G) {
  if (T_grid.size() < 4) {
    throw validation_error("exam grid needs at least 4 horizons");
  }
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (T_grid[i] < 10) {
      throw validation_error("exam horizons must be at least 10 steps");
    }
    if (i > 0 && T_grid[i] <= T_grid[i - 1]) {
      throw validation_error("exam grid must be strictly increasing");
    }
  }
  if (!std::isfinite(delta) || delta <= 0.0 || delta >= 0.5) {
    throw validation_error("exam delta must lie in (0, 0.5)");
  }
  if (!std::isfinite(D) || D <= 0.0 || !std::isfinite(G) || G <= 0.0) {
    throw validation_error("exam D and G must be finite and > 0");
  }

  QualifyReport report;
  report.family = family;
  report.T_grid = T_grid;
  report.delta = delta;
  report.no_closed_form_reference =
      family.kind == Kind::Cyclic || family.warmup_frac > 0.0;
  report.values.assign(T_grid.size(),
                       std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    try {
      report.values[i] = exam_functional(family, T_grid[i], D, G);
    } catch (const std::exception&) {
      report.singular = true;
    }
  }

  std::vector<double> ln_T, ln_v, growth;
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    const double v = report.values[i];
    if (!std::isfinite(v) || v <= 0.0) continue;
    const double T = static_cast<double>(T_grid[i]);
    ln_T.push_back(std::log(T));
    ln_v.push_back(std::log(v));
    growth.push_back(v * std::sqrt(T));
  }
  if (!report.singular && ln_T.size() < 4) {
    throw insufficient_data_error(
        "insufficient data: fewer than 4 finite exam values");
  }
  if (ln_T.size() >= 2) {
    report.alpha = -ols_slope(ln_T, ln_v);
    report.log_growth_slope = ols_slope(ln_T, growth);
    report.log_growth_threshold = 0.05 * growth.front();
    report.log_growth_detected =
        report.log_growth_slope > report.log_growth_threshold;
  } else {
    report.alpha = std::numeric_limits<double>::quiet_NaN();
    report.log_growth_slope = std::numeric_limits<double>::quiet_NaN();
    report.log_growth_threshold = std::numeric_limits<double>::quiet_NaN();
  }
  report.verdict = (!report.singular && report.alpha >= 0.5 - delta &&
                    !report.log_growth_detected)
                       ? Verdict::Qualified
                       : Verdict::NotQualified;
  return report;
}

std::string qualify_report_to_json(const QualifyReport& report) {
  json family;
  family["kind"] = to_string(report.family.kind);
  if (report.family.kind == Kind::WSD) family["c"] = report.family.wsd_c;
  if (report.family.warmup_frac > 0.0) {
    family["warmup_frac"] = report.family.warmup_frac;
  }
  if (report.family.kind == Kind::Cyclic) {
    family["cycles"] = report.family.cycles;
  }
  json j;
  j["family"] = family;
  j["T_grid"] = report.T_grid;
  j["values"] = report.values;  // NaN serializes as null
  j["alpha"] = report.alpha;
  j["log_growth_slope"] = report.log_growth_slope;
  j["log_growth_threshold"] = report.log_growth_threshold;
  j["log_growth_detected"] = report.log_growth_detected;
  j["no_closed_form_reference"] = report.no_closed_form_reference;
  j["singular"] = report.singular;
  j["delta"] = report.delta;
  j["verdict"] = to_string(report.verdict);
  return j.dump(2);
}

}  // namespace schedlaw
