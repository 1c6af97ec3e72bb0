#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <json.hpp>

#include "core/bound.hpp"
#include "core/errors.hpp"
#include "core/fitter.hpp"
#include "core/nnls.hpp"
#include "core/schedule.hpp"

using namespace schedlaw;

namespace {

// Loss trace generated by the bound itself; the fit must invert it exactly.
LossTrace bound_trace_data(const LearningRateSequence& lrs,
                           const BoundCoefficients& coeffs,
                           std::int64_t stride) {
  const PrefixSums pfx(lrs);
  LossTrace trace;
  for (std::int64_t tau = 1; tau <= pfx.size(); tau += stride) {
    trace.steps.push_back(tau);
    trace.losses.push_back(bound_last_fast(coeffs, pfx, tau));
  }
  return trace;
}

}  // namespace

TEST_CASE("design rows carry the bound pieces") {
  const PrefixSums one({1.0});
  const auto single = build_design(one, {1});
  REQUIRE(single.size() == 1);
  CHECK(single[0].x1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(single[0].x2 == doctest::Approx(0.5).epsilon(1e-15));

  const PrefixSums two({1.0, 1.0});
  const auto rows = build_design(two, {1, 2});
  CHECK(rows[1].x1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rows[1].x2 == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("design rows reassemble the bound exactly") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  LearningRateSequence lrs(64);
  for (double& lr : lrs) lr = 0.05 + unif(rng);
  const PrefixSums pfx(lrs);
  const BoundCoefficients coeffs{0.7, 1.9, 0.4};
  std::vector<std::int64_t> taus;
  for (std::int64_t tau = 1; tau <= 64; ++tau) taus.push_back(tau);
  const auto rows = build_design(pfx, taus);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double assembled = coeffs.L_star + coeffs.D * coeffs.D * rows[i].x1 +
                             coeffs.G * coeffs.G * rows[i].x2;
    CHECK(assembled == doctest::Approx(bound_last_fast(coeffs, pfx, taus[i]))
                           .epsilon(1e-12));
  }
}

TEST_CASE("nonnegative least squares solves separable systems") {
  const NnlsResult r = nnls({{1.0, 0.0}, {0.0, 1.0}}, {3.0, 4.0});
  CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.x[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.kkt_residual < 1e-10);
  CHECK_FALSE(r.collinearity_warning);
}

TEST_CASE("nonnegative least squares clamps at the boundary") {
  // Unconstrained solution is negative; the constrained one sits at zero.
  const NnlsResult r = nnls({{1.0, 1.0, 1.0}}, {-2.0, -1.0, -3.0});
  CHECK(r.x[0] == 0.0);

  // One coordinate active, one clamped.
  const NnlsResult mixed =
      nnls({{1.0, 0.0}, {0.0, 1.0}}, {5.0, -2.0});
  CHECK(mixed.x[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(mixed.x[1] == 0.0);
}

TEST_CASE("duplicated columns still reach the least-squares optimum") {
  // The active set never needs the twin column: once the first enters, the
  // second has zero gradient. Total weight matches the 1-column solution.
  const std::vector<double> c{1.0, 2.0, 3.0, 4.0};
  const NnlsResult r = nnls({c, c}, {1.1, 2.2, 3.1, 4.2});
  const double w = r.x[0] + r.x[1];
  CHECK(w == doctest::Approx(31.6 / 30.0).epsilon(1e-10));
  CHECK(r.kkt_residual < 1e-10);
}

TEST_CASE("an all-zero column is flagged and left at weight zero") {
  const std::vector<double> zero(4, 0.0);
  const std::vector<double> c{1.0, 2.0, 3.0, 4.0};
  const NnlsResult r = nnls({zero, c}, {1.0, 2.0, 3.0, 4.0});
  CHECK(r.collinearity_warning);
  CHECK(r.x[0] == 0.0);
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nnls rejects malformed inputs") {
  CHECK_THROWS_AS(nnls({}, {1.0}), validation_error);
  CHECK_THROWS_AS(nnls({{1.0, 2.0}}, {1.0}), validation_error);
  CHECK_THROWS_AS(nnls({{1.0, 2.0}, {1.0}}, {1.0, 2.0}), validation_error);
}

TEST_CASE("a noiseless bound trace is inverted exactly") {
  ScheduleSpec spec;
  spec.kind = Kind::WSD;
  spec.eta_peak = 0.5;
  spec.T = 2000;
  spec.wsd_c = 0.8;
  const auto lrs = eval_discrete(spec);
  const BoundCoefficients truth{2.0, 1.5, 0.8};
  const PrefixSums pfx(lrs);
  const auto taus = log_tau_grid(spec.T, 200);
  const auto rows = build_design(pfx, taus);
  std::vector<double> losses;
  for (std::int64_t tau : taus) {
    losses.push_back(bound_last_fast(truth, pfx, tau));
  }
  const FitReport report = nnls_fit(rows, losses);
  CHECK(report.L_inf == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(report.D_tilde == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(report.G_tilde == doctest::Approx(0.8).epsilon(1e-7));
  CHECK(report.kkt_residual < 1e-8);
  CHECK(report.r2_fit == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the full pipeline recovers coefficients and predicts the tail") {
  ScheduleSpec spec;
  spec.kind = Kind::WSD;
  spec.eta_peak = 0.5;
  spec.T = 4000;
  spec.wsd_c = 0.8;
  const auto lrs = eval_discrete(spec);
  const BoundCoefficients truth{2.0, 1.5, 0.8};
  const LossTrace trace = bound_trace_data(lrs, truth, 1);

  FitOptions opts;
  opts.split_frac = 0.5;
  opts.smoothing_window = 1;
  const FitReport report = fit_predict(trace, lrs, opts);
  CHECK(report.L_inf == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(report.D_tilde == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(report.G_tilde == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(report.r2_fit == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.r2_predict == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(report.n_fit + report.n_predict == 4000);
  CHECK(report.split_step == 2000);
  CHECK(report.fit_steps.size() == static_cast<std::size_t>(report.n_fit));
  for (double resid : report.fit_residuals) {
    CHECK(std::fabs(resid) < 1e-9);
  }
}

TEST_CASE("positional and schedule modes agree on full traces") {
  ScheduleSpec spec;
  spec.kind = Kind::CosineDecay;
  spec.eta_peak = 0.2;
  spec.T = 1200;
  const auto lrs = eval_discrete(spec);
  const BoundCoefficients truth{0.5, 1.0, 0.6};
  LossTrace trace = bound_trace_data(lrs, truth, 1);

  FitOptions opts;
  opts.smoothing_window = 1;
  const FitReport schedule_mode = fit_predict(trace, lrs, opts);
  trace.lrs = lrs;  // now rows carry their own rates
  const FitReport positional_mode = fit_predict(trace, {}, opts);
  CHECK(positional_mode.L_inf ==
        doctest::Approx(schedule_mode.L_inf).epsilon(1e-10));
  CHECK(positional_mode.D_tilde ==
        doctest::Approx(schedule_mode.D_tilde).epsilon(1e-10));
  CHECK(positional_mode.G_tilde ==
        doctest::Approx(schedule_mode.G_tilde).epsilon(1e-10));
}

TEST_CASE("relabeling steps leaves a positional fit unchanged") {
  // With an lr column the rows are consecutive steps; the labels only pick
  // the split point, so scaling them all by 10 changes nothing.
  ScheduleSpec spec;
  spec.kind = Kind::LinearDecay;
  spec.eta_peak = 0.3;
  spec.T = 800;
  const auto lrs = eval_discrete(spec);
  const BoundCoefficients truth{1.0, 2.0, 0.5};
  LossTrace trace = bound_trace_data(lrs, truth, 1);
  trace.lrs = lrs;

  LossTrace relabeled = trace;
  for (auto& s : relabeled.steps) s *= 10;

  FitOptions opts;
  opts.smoothing_window = 1;
  const FitReport a = fit_predict(trace, {}, opts);
  const FitReport b = fit_predict(relabeled, {}, opts);
  CHECK(a.L_inf == doctest::Approx(b.L_inf).epsilon(1e-12));
  CHECK(a.D_tilde == doctest::Approx(b.D_tilde).epsilon(1e-12));
  CHECK(a.G_tilde == doctest::Approx(b.G_tilde).epsilon(1e-12));
  CHECK(a.r2_predict == doctest::Approx(b.r2_predict).epsilon(1e-12));
  CHECK(a.n_fit == b.n_fit);
}

TEST_CASE("degenerate targets take the zero-variance convention") {
  const LearningRateSequence lrs(40, 0.1);
  const PrefixSums pfx(lrs);
  std::vector<std::int64_t> taus;
  for (std::int64_t tau = 1; tau <= 40; ++tau) taus.push_back(tau);
  const auto rows = build_design(pfx, taus);

  const FitReport zeros = nnls_fit(rows, std::vector<double>(40, 0.0));
  CHECK(zeros.L_inf == 0.0);
  CHECK(zeros.D_tilde == 0.0);
  CHECK(zeros.G_tilde == 0.0);
  CHECK(zeros.r2_fit == 1.0);

  const FitReport level = nnls_fit(rows, std::vector<double>(40, 3.5));
  CHECK(level.L_inf == doctest::Approx(3.5).epsilon(1e-9));
  CHECK(level.D_tilde == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(level.G_tilde == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(level.r2_fit == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("smoothing is a centered moving average") {
  const std::vector<double> y{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(smooth_losses(y, 0) == y);
  CHECK(smooth_losses(y, 1) == y);
  const auto w3 = smooth_losses(y, 3);
  const std::vector<double> expect3{1.5, 2.0, 3.0, 4.0, 4.5};
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(w3[i] == doctest::Approx(expect3[i]).epsilon(1e-15));
  }
  // Even windows lean one step forward.
  const auto w2 = smooth_losses(y, 2);
  const std::vector<double> expect2{1.5, 2.5, 3.5, 4.5, 5.0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    CHECK(w2[i] == doctest::Approx(expect2[i]).epsilon(1e-15));
  }
}

TEST_CASE("the automatic window scales with the trace length") {
  ScheduleSpec spec;
  spec.kind = Kind::LinearDecay;
  spec.eta_peak = 0.3;
  spec.T = 1000;
  const auto lrs = eval_discrete(spec);
  const LossTrace trace = bound_trace_data(lrs, {1.0, 1.0, 1.0}, 1);
  const FitReport report = fit_predict(trace, lrs, FitOptions{});
  CHECK(report.smoothing_window == 5);  // 1000/200
}

TEST_CASE("early steps can be dropped before fitting") {
  ScheduleSpec spec;
  spec.kind = Kind::CosineDecay;
  spec.eta_peak = 0.2;
  spec.T = 100;
  const auto lrs = eval_discrete(spec);
  const LossTrace trace = bound_trace_data(lrs, {1.0, 1.0, 1.0}, 1);

  FitOptions opts;
  opts.smoothing_window = 1;
  opts.t_min = 20;
  const FitReport report = fit_predict(trace, lrs, opts);
  CHECK(report.n_fit == 31);  // steps 20..50
  CHECK(report.fit_steps.front() == 20);

  opts.t_min = 1000;
  CHECK_THROWS_WITH_AS(fit_predict(trace, lrs, opts),
                       doctest::Contains("t_min"), validation_error);
}

TEST_CASE("splits that starve either segment are rejected") {
  ScheduleSpec spec;
  spec.kind = Kind::LinearDecay;
  spec.eta_peak = 0.1;
  spec.T = 100;
  const auto lrs = eval_discrete(spec);
  const LossTrace trace = bound_trace_data(lrs, {1.0, 1.0, 1.0}, 1);

  FitOptions opts;
  opts.split_frac = 0.01;
  CHECK_THROWS_WITH_AS(fit_predict(trace, lrs, opts),
                       doctest::Contains("fit segment"), validation_error);
  opts.split_frac = 0.999;
  CHECK_THROWS_WITH_AS(fit_predict(trace, lrs, opts),
                       doctest::Contains("held-out"), validation_error);
  opts.split_frac = 1.5;
  CHECK_THROWS_AS(fit_predict(trace, lrs, opts), validation_error);
}

TEST_CASE("trace validation catches structural problems") {
  LossTrace trace;
  CHECK_THROWS_AS(validate(trace), validation_error);
  trace.steps = {1, 2, 2};
  trace.losses = {1.0, 0.5, 0.4};
  CHECK_THROWS_AS(validate(trace), validation_error);
  trace.steps = {1, 2, 3};
  CHECK_NOTHROW(validate(trace));
  trace.losses[1] = -0.5;
  CHECK_THROWS_AS(validate(trace), validation_error);
  trace.losses[1] = 0.5;
  trace.lrs = {0.1, 0.1};
  CHECK_THROWS_AS(validate(trace), validation_error);

  LossTrace no_rates;
  no_rates.steps = {1, 2, 3, 4, 5, 6};
  no_rates.losses = std::vector<double>(6, 1.0);
  CHECK_THROWS_WITH_AS(fit_predict(no_rates, {}, FitOptions{}),
                       doctest::Contains("schedule"), validation_error);
  CHECK_THROWS_AS(fit_predict(no_rates, LearningRateSequence(4, 0.1),
                              FitOptions{}),
                  validation_error);  // steps run past the horizon
}

TEST_CASE("fit reports serialize every headline number") {
  ScheduleSpec spec;
  spec.kind = Kind::WSD;
  spec.eta_peak = 0.5;
  spec.T = 500;
  const auto lrs = eval_discrete(spec);
  const LossTrace trace = bound_trace_data(lrs, {2.0, 1.5, 0.8}, 1);
  FitOptions opts;
  opts.smoothing_window = 1;
  const FitReport report = fit_predict(trace, lrs, opts);
  const nlohmann::json j = nlohmann::json::parse(fit_report_to_json(report));
  for (const char* key :
       {"L_inf", "D_tilde", "G_tilde", "r2_fit", "r2_fit_raw", "r2_predict",
        "r2_predict_raw", "kkt_residual", "collinearity_warning",
        "split_step", "smoothing_window", "n_fit", "n_predict"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }
  CHECK(j.at("L_inf").get<double>() == doctest::Approx(report.L_inf));
}
