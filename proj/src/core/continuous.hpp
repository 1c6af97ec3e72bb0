#pragma once

#include <cstdint>

#include "core/bound.hpp"
#include "core/schedule.hpp"

namespace schedlaw {

// Continuous analog of the single-iterate bound over the full horizon:
//   L* + D^2/(2 A(0)) + (G^2/2) int_0^{T-1} eta(t)^2 / A(t) dt
// with A(t) = int_t^T eta. Used where the discrete bound is singular: the
// final step of schedules that decay to zero.
double continuous_bound_last(const ScheduleSpec& spec,
                             const BoundCoefficients& coeffs);

// Bound trace for a schedule spec. Interior grid points use the discrete
// forms. For the single-iterate kind, the tau = T point switches to the
// continuous functional when eta_T = 0, where the discrete value is an
// epsilon-floor artifact rather than a finite bound.
BoundTrace bound_trace(const BoundCoefficients& coeffs,
                       const ScheduleSpec& spec,
                       const std::vector<std::int64_t>& tau_grid,
                       BoundKind kind);

struct NumericOptimum {
  double eta_star = 0.0;
  double bound_star = 0.0;
};

// Minimizes the full-horizon single-iterate bound over eta_peak: 200-point
// geometric grid spanning [1e-6, 1e2]*(D/G)/sqrt(T), then one golden-section
// refinement around the best point. Schedules ending at zero are scored with
// the continuous functional, others with the discrete bound.
NumericOptimum optimal_peak_lr_numeric(const ScheduleFamily& family,
                                       const BoundCoefficients& coeffs,
                                       std::int64_t T);

// Qualifying-exam functional: the continuous bound with
// eta(t) = s_t(T)/sqrt(T) and L* = 0.
double exam_functional(const ScheduleFamily& family, std::int64_t T, double D,
                       double G);

}  // namespace schedlaw
