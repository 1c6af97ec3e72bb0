#include "core/bound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/errors.hpp"
#include "core/quadrature.hpp"
#include "core/threads.hpp"

namespace schedlaw {

namespace {

void check_tau(const PrefixSums& pfx, std::int64_t tau) {
  if (tau < 1 || tau > pfx.size()) {
    throw validation_error("tau out of range [1, T]");
  }
}

// D^2/(2 S1) + L*, the part shared by every bound; S1 must be positive.
double distance_term(const BoundCoefficients& c, double S1) {
  return c.L_star + c.D * c.D / (2.0 * S1);
}

}  // namespace

void validate(const BoundCoefficients& coeffs) {
  if (!std::isfinite(coeffs.L_star) || !std::isfinite(coeffs.D) ||
      !std::isfinite(coeffs.G)) {
    throw validation_error("BoundCoefficients fields must be finite");
  }
  if (coeffs.D < 0.0) throw validation_error("BoundCoefficients.D must be >= 0");
  if (coeffs.G < 0.0) throw validation_error("BoundCoefficients.G must be >= 0");
}

PrefixSums::PrefixSums(const LearningRateSequence& lrs) : lrs_(lrs) {
  if (lrs.empty()) throw validation_error("learning-rate sequence is empty");
  const std::size_t n = lrs.size();
  s1_.resize(n + 1);
  s2_.resize(n + 1);
  max_.resize(n + 1);
  lastpos_.resize(n + 1);
  s1_[0] = s2_[0] = max_[0] = 0.0;
  lastpos_[0] = 0;
  long double a1 = 0.0L, a2 = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = lrs[i];
    if (!std::isfinite(eta) || eta < 0.0) {
      throw validation_error("learning rates must be finite and non-negative");
    }
    a1 += eta;
    a2 += static_cast<long double>(eta) * eta;
    s1_[i + 1] = static_cast<double>(a1);
    s2_[i + 1] = static_cast<double>(a2);
    max_[i + 1] = std::max(max_[i], eta);
    lastpos_[i + 1] = eta > 0.0 ? static_cast<std::int64_t>(i + 1) : lastpos_[i];
  }
}

double floor_epsilon(double eta_max, std::int64_t tau) {
  return 1e-12 * eta_max * static_cast<double>(tau);
}

double bound_averaged(const BoundCoefficients& coeffs, const PrefixSums& pfx,
                      std::int64_t tau) {
  validate(coeffs);
  check_tau(pfx, tau);
  const double S1 = pfx.s1(tau);
  if (S1 <= 0.0) {
    throw numeric_error(
        "degenerate schedule: learning rates sum to zero over steps 1..tau");
  }
  return distance_term(coeffs, S1) +
         coeffs.G * coeffs.G * pfx.s2(tau) / (2.0 * S1);
}

double bound_last(const BoundCoefficients& coeffs, const PrefixSums& pfx,
                  std::int64_t tau) {
  validate(coeffs);
  check_tau(pfx, tau);
  const double S1 = pfx.s1(tau);
  const double S2 = pfx.s2(tau);
  const double eps = floor_epsilon(pfx.max_prefix(tau), tau);
  if (S1 <= 0.0 || eps <= 0.0) {
    throw numeric_error(
        "singularity at k=0: suffix denominator underflows even after "
        "flooring (all learning rates zero up to tau)");
  }
  double dsum = 0.0;
  for (std::int64_t k = 1; k < tau; ++k) {
    const double eta_k = pfx.lr(k);
    const double den_a = std::max(S1 - pfx.s1(k), eps);
    const double den_b = std::max(S1 - pfx.s1(k - 1), eps);
    dsum += (eta_k / den_a) * ((S2 - pfx.s2(k - 1)) / den_b);
  }
  return distance_term(coeffs, S1) +
         (coeffs.G * coeffs.G / 2.0) * (S2 / S1 + dsum);
}

double last_iterate_bracket(const PrefixSums& pfx, std::int64_t tau) {
  check_tau(pfx, tau);
  const double S1 = pfx.s1(tau);
  const double eps = floor_epsilon(pfx.max_prefix(tau), tau);
  if (S1 <= 0.0 || eps <= 0.0) {
    throw numeric_error(
        "singularity at k=0: suffix denominator underflows even after "
        "flooring (all learning rates zero up to tau)");
  }
  double sum = 0.0;
  for (std::int64_t t = 1; t < tau; ++t) {
    const double eta_t = pfx.lr(t);
    sum += eta_t * eta_t / std::max(S1 - pfx.s1(t), eps);
  }
  const std::int64_t r = pfx.last_positive(tau);
  const double boundary = r > 0 ? pfx.lr(r) : 0.0;
  return sum + boundary;
}

double bound_last_fast(const BoundCoefficients& coeffs, const PrefixSums& pfx,
                       std::int64_t tau) {
  validate(coeffs);
  const double bracket = last_iterate_bracket(pfx, tau);
  return distance_term(coeffs, pfx.s1(tau)) +
         (coeffs.G * coeffs.G / 2.0) * bracket;
}

double bound_averaged(const BoundCoefficients& coeffs,
                      const LearningRateSequence& lrs, std::int64_t tau) {
  return bound_averaged(coeffs, PrefixSums(lrs), tau);
}

double bound_last(const BoundCoefficients& coeffs,
                  const LearningRateSequence& lrs, std::int64_t tau) {
  return bound_last(coeffs, PrefixSums(lrs), tau);
}

double bound_last_fast(const BoundCoefficients& coeffs,
                       const LearningRateSequence& lrs, std::int64_t tau) {
  return bound_last_fast(coeffs, PrefixSums(lrs), tau);
}

std::string to_string(BoundKind kind) {
  return kind == BoundKind::AveragedIterate ? "averaged" : "last";
}

BoundKind bound_kind_from_string(const std::string& name) {
  if (name == "averaged") return BoundKind::AveragedIterate;
  if (name == "last") return BoundKind::LastIterate;
  throw validation_error("unknown bound kind '" + name +
                         "' (expected 'averaged' or 'last')");
}

std::vector<std::int64_t> log_tau_grid(std::int64_t T, std::int64_t points) {
  if (T < 1) throw validation_error("grid horizon must be >= 1");
  if (points < 1) throw validation_error("grid size must be >= 1");
  std::vector<std::int64_t> grid;
  grid.reserve(static_cast<std::size_t>(points));
  const double logT = std::log(static_cast<double>(T));
  for (std::int64_t i = 0; i < points; ++i) {
    const double frac = points == 1 ? 1.0
                                    : static_cast<double>(i) /
                                          static_cast<double>(points - 1);
    auto tau = static_cast<std::int64_t>(std::llround(std::exp(frac * logT)));
    grid.push_back(std::clamp<std::int64_t>(tau, 1, T));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

BoundTrace bound_trace(const BoundCoefficients& coeffs,
                       const LearningRateSequence& lrs,
                       const std::vector<std::int64_t>& tau_grid,
                       BoundKind kind) {
  validate(coeffs);
  PrefixSums pfx(lrs);
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (tau_grid[i] < 1 || tau_grid[i] > pfx.size() ||
        (i > 0 && tau_grid[i] <= tau_grid[i - 1])) {
      throw validation_error(
          "tau grid must be strictly increasing within [1, T]");
    }
  }
  if (tau_grid.empty()) throw validation_error("tau grid is empty");
  BoundTrace trace;
  trace.kind = kind;
  trace.tau_grid = tau_grid;
  trace.values.assign(tau_grid.size(), 0.0);
  std::vector<std::string> failures(tau_grid.size());
  parallel_for(static_cast<std::int64_t>(tau_grid.size()),
               [&](std::int64_t i) {
                 const std::int64_t tau = tau_grid[static_cast<std::size_t>(i)];
                 try {
                   trace.values[static_cast<std::size_t>(i)] =
                       kind == BoundKind::AveragedIterate
                           ? bound_averaged(coeffs, pfx, tau)
                           : bound_last_fast(coeffs, pfx, tau);
                 } catch (const std::exception& e) {
                   failures[static_cast<std::size_t>(i)] = e.what();
                 }
               });
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      throw numeric_error("bound trace failed at tau=" +
                          std::to_string(tau_grid[i]) + ": " + failures[i]);
    }
  }
  return trace;
}

namespace {

// Table coefficient printed for the cosine bound.
constexpr double kCosinePrinted = 1.061;

double wsd_log_factor(double c) {
  return 1.0 + 0.5 * std::log((1.0 + c) / (1.0 - c));
}

void check_closed_form_args(double eta_peak, double T) {
  if (!(eta_peak > 0.0) || !std::isfinite(eta_peak)) {
    throw validation_error("eta_peak must be finite and > 0");
  }
  if (!(T >= 2.0) || !std::isfinite(T)) {
    throw validation_error("closed forms require T >= 2");
  }
}

}  // namespace

double closed_form_bound(Kind kind, const BoundCoefficients& coeffs,
                         double eta_peak, double T, double wsd_c) {
  validate(coeffs);
  check_closed_form_args(eta_peak, T);
  const double D2 = coeffs.D * coeffs.D;
  const double G2 = coeffs.G * coeffs.G;
  const double eta = eta_peak;
  switch (kind) {
    case Kind::Constant:
      return coeffs.L_star + D2 / (2.0 * T * eta) +
             eta * G2 / 2.0 * std::log(T);
    case Kind::SqrtInverse:
      return coeffs.L_star + D2 / (4.0 * std::sqrt(T) * eta) +
             eta * G2 * std::log(T) / (4.0 * std::sqrt(T));
    case Kind::LinearDecay:
      return coeffs.L_star + D2 / (T * eta) + eta * G2;
    case Kind::CosineDecay:
      return coeffs.L_star + D2 / (T * eta) + kCosinePrinted * eta * G2;
    case Kind::WSD: {
      if (!(wsd_c > 0.0 && wsd_c < 1.0)) {
        throw validation_error("wsd c must lie strictly in (0, 1)");
      }
      return coeffs.L_star + D2 / ((1.0 + wsd_c) * T * eta) +
             eta * G2 * wsd_log_factor(wsd_c);
    }
    case Kind::Cyclic:
      throw validation_error(
          "no closed-form bound derived for cyclic schedules");
  }
  throw validation_error("unknown schedule kind");
}

OptimalLr optimal_peak_lr(Kind kind, const BoundCoefficients& coeffs, double T,
                          double wsd_c) {
  validate(coeffs);
  check_closed_form_args(1.0, T);
  if (coeffs.D == 0.0 || coeffs.G == 0.0) {
    throw numeric_error(
        "degenerate optimum: bound is monotone in eta when D or G is zero");
  }
  const double ratio = coeffs.D / coeffs.G;
  OptimalLr out;
  switch (kind) {
    case Kind::Constant:
      out.eta_star = ratio / std::sqrt(T * std::log(T));
      out.bound_star =
          coeffs.L_star + coeffs.D * coeffs.G * std::sqrt(std::log(T) / T);
      out.formula =
          "L* + D^2/(2*T*eta) + (eta*G^2/2)*ln T; eta* = D/(G*sqrt(T*ln T))";
      return out;
    case Kind::SqrtInverse:
      out.eta_star = ratio / std::sqrt(std::log(T));
      out.bound_star = coeffs.L_star + coeffs.D * coeffs.G *
                                           std::sqrt(std::log(T) / (4.0 * T));
      out.formula =
          "L* + D^2/(4*sqrt(T)*eta) + eta*G^2*ln T/(4*sqrt(T)); "
          "eta* = D/(G*sqrt(ln T))";
      return out;
    case Kind::LinearDecay:
      out.eta_star = ratio / std::sqrt(T);
      out.bound_star = coeffs.L_star + 2.0 * coeffs.D * coeffs.G / std::sqrt(T);
      out.formula = "L* + D^2/(T*eta) + eta*G^2; eta* = D/(G*sqrt(T))";
      return out;
    case Kind::CosineDecay:
      out.eta_star = ratio / std::sqrt(kCosinePrinted * T);
      out.bound_star = coeffs.L_star + 2.0 * coeffs.D * coeffs.G *
                                           std::sqrt(kCosinePrinted / T);
      out.formula =
          "L* + D^2/(T*eta) + 1.061*eta*G^2; eta* = D/(G*sqrt(1.061*T))";
      return out;
    case Kind::WSD: {
      if (!(wsd_c > 0.0 && wsd_c < 1.0)) {
        throw validation_error("wsd c must lie strictly in (0, 1)");
      }
      const double f = wsd_log_factor(wsd_c);
      out.eta_star = ratio / std::sqrt((1.0 + wsd_c) * f * T);
      out.bound_star = coeffs.L_star + 2.0 * coeffs.D * coeffs.G *
                                           std::sqrt(f / ((1.0 + wsd_c) * T));
      out.formula =
          "L* + D^2/((1+c)*T*eta) + eta*G^2*(1 + ln((1+c)/(1-c))/2); "
          "eta* = D/(G*sqrt((1+c)*(1 + ln((1+c)/(1-c))/2)*T))";
      return out;
    }
    case Kind::Cyclic:
      throw validation_error(
          "no closed-form optimum derived for cyclic schedules");
  }
  throw validation_error("unknown schedule kind");
}

namespace {

constexpr double kPi = std::numbers::pi;

// Integrand of the cosine-decay constant. Removable singularity at x=1 with
// analytic limit 0.9*pi^2*(1-x).
double cosine_integrand(double x) {
  const double num =
      (1.0 + std::cos(kPi * x)) *
      (3.0 * (1.0 - x) / 8.0 - std::sin(kPi * x) / (2.0 * kPi) -
       std::sin(2.0 * kPi * x) / (16.0 * kPi));
  const double den = (1.0 - x) / 2.0 - std::sin(kPi * x) / (2.0 * kPi);
  return num / (den * den);
}

double compute_cosine_integral() {
  // The bracketed factor of the numerator is O((1-x)^5) assembled from O(1-x)
  // terms, so past this split the direct form is cancellation noise; switch
  // to the analytic limit there. Its integral over the tail is
  // 0.9*pi^2*delta^2/2 with an O(delta^4) error, far below the tolerance.
  const double split = 1.0 - 1e-2;
  const double head = adaptive_simpson(cosine_integrand, 0.0, split, 1e-6);
  const double delta = 1.0 - split;
  const double tail = 0.9 * kPi * kPi * delta * delta / 2.0;
  const double value = head + tail;
  if (!std::isfinite(value)) {
    throw numeric_error("quadrature failed on the cosine-decay constant");
  }
  return value;
}

}  // namespace

double cosine_integral_constant() {
  static const double value = compute_cosine_integral();
  return value;
}

double cosine_bound_coefficient() {
  return 3.0 / 8.0 + cosine_integral_constant() / 4.0;
}

}  // namespace schedlaw
