#include "core/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "core/errors.hpp"
#include "core/quadrature.hpp"

namespace schedlaw {

namespace {

constexpr double kPi = std::numbers::pi;

// Points in (0, T) where the schedule is only piecewise smooth. Quadrature
// cells never straddle these.
std::vector<double> schedule_knots(const ScheduleSpec& spec) {
  std::vector<double> knots;
  const double T = static_cast<double>(spec.T);
  const double W = static_cast<double>(warmup_steps(spec));
  if (W > 0.0) knots.push_back(W);
  const double horizon = T - W;
  auto add = [&](double t) {
    if (t > 0.0 && t < horizon) knots.push_back(W + t);
  };
  switch (spec.kind) {
    case Kind::WSD:
      add(spec.wsd_c * horizon);
      break;
    case Kind::Cyclic: {
      const double period = horizon / static_cast<double>(spec.cycles);
      for (std::int64_t i = 1; i < 2 * spec.cycles; ++i) {
        add(static_cast<double>(i) * period / 2.0);
      }
      break;
    }
    default:
      break;
  }
  std::sort(knots.begin(), knots.end());
  return knots;
}

// A(t) = int_t^T eta. Closed forms where the shape integrates in closed
// form; otherwise a piecewise-Simpson suffix table refined to ~T/8192 cells
// with knot-aligned boundaries.
class SuffixIntegral {
 public:
  explicit SuffixIntegral(const ScheduleSpec& spec) : spec_(spec) {
    validate(spec);
    closed_ = spec.warmup_frac == 0.0 && spec.kind != Kind::Cyclic;
    if (closed_) return;

    const double T = static_cast<double>(spec.T);
    std::vector<double> knots = schedule_knots(spec);
    knots.insert(knots.begin(), 0.0);
    knots.push_back(T);
    const double h_target = T / 8192.0;
    bounds_.push_back(0.0);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double a = knots[i];
      const double b = knots[i + 1];
      const auto cells = static_cast<std::int64_t>(
          std::max(1.0, std::ceil((b - a) / h_target)));
      for (std::int64_t j = 1; j <= cells; ++j) {
        bounds_.push_back(a + (b - a) * static_cast<double>(j) /
                                  static_cast<double>(cells));
      }
    }
    bounds_.back() = T;
    suffix_.assign(bounds_.size(), 0.0);
    for (std::size_t i = bounds_.size() - 1; i-- > 0;) {
      suffix_[i] = suffix_[i + 1] + simpson(bounds_[i], bounds_[i + 1]);
    }
  }

  double operator()(double t) const {
    const double T = static_cast<double>(spec_.T);
    if (t <= 0.0) return total();
    if (t >= T) return 0.0;
    if (closed_) return closed_suffix(t);
    const auto it = std::upper_bound(bounds_.begin(), bounds_.end(), t);
    const auto idx = static_cast<std::size_t>(it - bounds_.begin()) - 1;
    return simpson(t, bounds_[idx + 1]) + suffix_[idx + 1];
  }

  double total() const {
    if (closed_) return closed_suffix(0.0);
    return suffix_.front();
  }

 private:
  double simpson(double a, double b) const {
    const double fa = eval_continuous(spec_, a);
    const double fm = eval_continuous(spec_, 0.5 * (a + b));
    const double fb = eval_continuous(spec_, b);
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double closed_suffix(double t) const {
    const double eta = spec_.eta_peak;
    const double T = static_cast<double>(spec_.T);
    switch (spec_.kind) {
      case Kind::Constant:
        return eta * (T - t);
      case Kind::SqrtInverse:
        return 2.0 * eta * (std::sqrt(T + 1.0) - std::sqrt(t + 1.0));
      case Kind::LinearDecay:
        return eta * (T - t) * (T - t) / (2.0 * T);
      case Kind::CosineDecay:
        return eta * (0.5 * (T - t) - (T / (2.0 * kPi)) * std::sin(kPi * t / T));
      case Kind::WSD: {
        const double stable_end = spec_.wsd_c * T;
        if (t < stable_end) {
          return eta * (stable_end - t + 0.5 * (T - stable_end));
        }
        return eta * (T - t) * (T - t) / (2.0 * (T - stable_end));
      }
      case Kind::Cyclic:
        break;  // table path
    }
    return 0.0;
  }

  ScheduleSpec spec_;
  bool closed_ = false;
  std::vector<double> bounds_;
  std::vector<double> suffix_;
};

// Integration boundaries for int_0^{T-1} .../A(t) dt: geometric spacing from
// the right edge (T-1, T-2, T-4, ...) where A(t) varies fastest.
std::vector<double> outer_segments(double T) {
  std::vector<double> pts;
  pts.push_back(T - 1.0);
  for (double back = 2.0; T - back > 0.0; back *= 2.0) {
    pts.push_back(T - back);
  }
  pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

double continuous_bound_last(const ScheduleSpec& spec,
                             const BoundCoefficients& coeffs) {
  validate(spec);
  validate(coeffs);
  const SuffixIntegral A(spec);
  const double A0 = A.total();
  if (!std::isfinite(A0) || A0 <= 0.0) {
    throw numeric_error("schedule integrates to zero over the horizon");
  }
  const double T = static_cast<double>(spec.T);
  double integral = 0.0;
  if (T > 1.0) {
    auto f = [&](double t) {
      const double e = eval_continuous(spec, t);
      return e * e / A(t);
    };
    const std::vector<double> pts = outer_segments(T);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      integral += adaptive_simpson(f, pts[i], pts[i + 1], 1e-14, 1e-9, 40);
    }
  }
  return coeffs.L_star + coeffs.D * coeffs.D / (2.0 * A0) +
         0.5 * coeffs.G * coeffs.G * integral;
}

BoundTrace bound_trace(const BoundCoefficients& coeffs,
                       const ScheduleSpec& spec,
                       const std::vector<std::int64_t>& tau_grid,
                       BoundKind kind) {
  validate(spec);
  const LearningRateSequence lrs = eval_discrete(spec);
  BoundTrace trace = bound_trace(coeffs, lrs, tau_grid, kind);
  if (kind == BoundKind::LastIterate && !trace.tau_grid.empty() &&
      trace.tau_grid.back() == spec.T && lrs.back() == 0.0) {
    trace.values.back() = continuous_bound_last(spec, coeffs);
  }
  return trace;
}

NumericOptimum optimal_peak_lr_numeric(const ScheduleFamily& family,
                                       const BoundCoefficients& coeffs,
                                       std::int64_t T) {
  validate(coeffs);
  if (T < 2) {
    throw validation_error("peak-rate search needs a horizon of at least 2");
  }
  if (coeffs.D == 0.0 || coeffs.G == 0.0) {
    throw numeric_error(
        "degenerate optimum: D and G must both be positive to trade off");
  }
  const ScheduleSpec probe = make_spec(family, 1.0, T);
  const LearningRateSequence shape = eval_discrete(probe);
  const bool zero_tail = shape.back() == 0.0;

  auto value = [&](double eta) {
    const ScheduleSpec spec = make_spec(family, eta, T);
    if (zero_tail) return continuous_bound_last(spec, coeffs);
    LearningRateSequence lrs = shape;
    for (double& v : lrs) v *= eta;
    return bound_last_fast(coeffs, lrs, T);
  };

  const double center = (coeffs.D / coeffs.G) / std::sqrt(static_cast<double>(T));
  const double lo = 1e-6 * center;
  const double hi = 1e2 * center;
  constexpr int kGridPoints = 200;
  double best_eta = lo;
  double best_val = value(lo);
  int best_idx = 0;
  for (int i = 1; i < kGridPoints; ++i) {
    const double eta =
        lo * std::pow(hi / lo, static_cast<double>(i) / (kGridPoints - 1));
    const double v = value(eta);
    if (v < best_val) {
      best_val = v;
      best_eta = eta;
      best_idx = i;
    }
  }

  // Golden-section refinement in log space around the winning grid point.
  const double step = std::log(hi / lo) / (kGridPoints - 1);
  double a = std::log(best_eta) - (best_idx > 0 ? step : 0.0);
  double b = std::log(best_eta) + (best_idx < kGridPoints - 1 ? step : 0.0);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = value(std::exp(x1));
  double f2 = value(std::exp(x2));
  for (int iter = 0; iter < 200 && (b - a) > 1e-11; ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = value(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = value(std::exp(x2));
    }
  }
  const double eta_star = std::exp(0.5 * (a + b));
  const double bound_star = value(eta_star);
  if (bound_star < best_val) {
    return {eta_star, bound_star};
  }
  return {best_eta, best_val};
}

double exam_functional(const ScheduleFamily& family, std::int64_t T, double D,
                       double G) {
  if (T < 10) {
    throw validation_error("exam horizon must be at least 10 steps");
  }
  const ScheduleSpec spec =
      make_spec(family, 1.0 / std::sqrt(static_cast<double>(T)), T);
  BoundCoefficients coeffs;
  coeffs.L_star = 0.0;
  coeffs.D = D;
  coeffs.G = G;
  return continuous_bound_last(spec, coeffs);
}

}  // namespace schedlaw
