#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/schedule.hpp"

namespace schedlaw {

struct BoundCoefficients {
  double L_star = 0.0;  // irreducible loss
  double D = 1.0;       // initial-distance coefficient
  double G = 1.0;       // gradient-norm coefficient
};

void validate(const BoundCoefficients& coeffs);

// Prefix sums over a learning-rate sequence. Index i counts steps, so
// s1(i) = sum of eta_t for t <= i and s1(0) = 0. Also tracks the running
// max (for the epsilon floor) and the last strictly positive index.
class PrefixSums {
 public:
  explicit PrefixSums(const LearningRateSequence& lrs);

  std::int64_t size() const { return static_cast<std::int64_t>(lrs_.size()); }
  double lr(std::int64_t t) const { return lrs_[static_cast<std::size_t>(t - 1)]; }
  double s1(std::int64_t i) const { return s1_[static_cast<std::size_t>(i)]; }
  double s2(std::int64_t i) const { return s2_[static_cast<std::size_t>(i)]; }
  double max_prefix(std::int64_t i) const { return max_[static_cast<std::size_t>(i)]; }
  // Largest t <= i with eta_t > 0, or 0 when the prefix is all zero.
  std::int64_t last_positive(std::int64_t i) const { return lastpos_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<double> lrs_;
  std::vector<double> s1_, s2_, max_;
  std::vector<std::int64_t> lastpos_;
};

// Floor applied to the inner suffix denominators of the single-iterate bound.
double floor_epsilon(double eta_max, std::int64_t tau);

// Averaged-iterate bound:
//   L* + D^2/(2 S1) + G^2 S2/(2 S1),  sums over t = 1..tau.
double bound_averaged(const BoundCoefficients& coeffs, const PrefixSums& pfx,
                      std::int64_t tau);
double bound_averaged(const BoundCoefficients& coeffs,
                      const LearningRateSequence& lrs, std::int64_t tau);

// Single-iterate bound, double-sum form:
//   averaged form + (G^2/2) sum_{k<tau} [eta_k/suffix(k)]
//                                      [(S2(tau)-S2(k-1))/(S1(tau)-S1(k-1))]
// with suffix(k) = S1(tau) - S1(k) floored at epsilon.
double bound_last(const BoundCoefficients& coeffs, const PrefixSums& pfx,
                  std::int64_t tau);
double bound_last(const BoundCoefficients& coeffs,
                  const LearningRateSequence& lrs, std::int64_t tau);

// Equivalent single-sum form:
//   L* + D^2/(2 S1) + (G^2/2)[ sum_{t<tau} eta_t^2/suffix(t) + eta_r ]
// where eta_r is the last positive rate in the prefix. The boundary term
// falls out of telescoping the double sum; it reduces to eta_tau whenever
// eta_tau > 0 and keeps the two forms equal under the epsilon floor.
double bound_last_fast(const BoundCoefficients& coeffs, const PrefixSums& pfx,
                       std::int64_t tau);
double bound_last_fast(const BoundCoefficients& coeffs,
                       const LearningRateSequence& lrs, std::int64_t tau);

// The bracketed factor of the fast form: sum_{t<tau} eta_t^2/suffix(t) plus
// the boundary rate. bound_last_fast is L* + D^2/(2 S1) + (G^2/2) * bracket;
// the trace fitter reuses it as a design column.
double last_iterate_bracket(const PrefixSums& pfx, std::int64_t tau);

enum class BoundKind { AveragedIterate, LastIterate };

std::string to_string(BoundKind kind);
BoundKind bound_kind_from_string(const std::string& name);

struct BoundTrace {
  BoundKind kind = BoundKind::LastIterate;
  std::vector<std::int64_t> tau_grid;
  std::vector<double> values;
};

// Geometric grid of integers from 1 to T, deduplicated. points >= 1.
std::vector<std::int64_t> log_tau_grid(std::int64_t T, std::int64_t points);

BoundTrace bound_trace(const BoundCoefficients& coeffs,
                       const LearningRateSequence& lrs,
                       const std::vector<std::int64_t>& tau_grid,
                       BoundKind kind);

// Asymptotic closed-form bound per kind, evaluated as printed:
//   constant      L* + D^2/(2 T eta) + (eta G^2/2) ln T
//   sqrt_inverse  L* + D^2/(4 sqrt(T) eta) + eta G^2 ln T/(4 sqrt(T))
//   linear_decay  L* + D^2/(T eta) + eta G^2
//   cosine_decay  L* + D^2/(T eta) + 1.061 eta G^2
//   wsd(c)        L* + D^2/((1+c) T eta) + eta G^2 (1 + ln((1+c)/(1-c))/2)
// Cyclic has no derived form and is rejected.
double closed_form_bound(Kind kind, const BoundCoefficients& coeffs,
                         double eta_peak, double T, double wsd_c = 0.8);

struct OptimalLr {
  double eta_star = 0.0;
  double bound_star = 0.0;
  std::string formula;
};

// Closed-form minimizer of closed_form_bound over eta_peak.
OptimalLr optimal_peak_lr(Kind kind, const BoundCoefficients& coeffs, double T,
                          double wsd_c = 0.8);

// The integral behind the cosine closed form (~2.7443); the bound coefficient
// is 3/8 + integral/4 (~1.061). Computed once, cached.
double cosine_integral_constant();
double cosine_bound_coefficient();

}  // namespace schedlaw
