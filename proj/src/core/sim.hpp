#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/fitter.hpp"
#include "core/schedule.hpp"

namespace schedlaw {

enum class ProblemKind { L1Distance, HuberQuadratic, PiecewiseLinearMax };

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

// Convex test problem with exactly known constants: minimum L_star at
// w_star, deterministic subgradient norm <= G_true - noise_scale, stochastic
// gradient norm <= G_true surely.
struct ConvexProblem {
  ProblemKind kind = ProblemKind::L1Distance;
  std::int64_t d = 1;
  std::vector<double> w_star;
  std::vector<double> w0;
  double G_true = 1.0;
  double noise_scale = 0.0;
  double L_star = 0.0;
  double huber_delta = 0.0;  // HuberQuadratic only
};

void validate(const ConvexProblem& problem);

// Distance from the start point to the minimizer; make_problem makes this
// exactly D_target.
double distance_to_optimum(const ConvexProblem& problem);

ConvexProblem make_problem(ProblemKind kind, std::int64_t d, double D_target,
                           double G_target, double noise_scale,
                           std::uint64_t seed);

double loss_at(const ConvexProblem& problem, const std::vector<double>& w);

struct SimResult {
  LossTrace trace;           // loss of the current iterate, on the grid
  LossTrace averaged_trace;  // loss of the eta-weighted averaged iterate
  // eta-weighted mean of past iterate losses; upper-bounds the averaged
  // losses pointwise by convexity.
  std::vector<double> running_loss_avg;
  std::uint64_t seed = 0;
  std::int64_t clipped_steps = 0;  // gradients rescaled onto the G ball
  double max_gradient_norm = 0.0;
};

// Runs w_{t} = w_{t-1} - eta_t g(w_{t-1}) for t = 1..T with bounded noise,
// recording at the given steps. Bit-reproducible for a fixed seed.
SimResult sgd_run(const ConvexProblem& problem, const LearningRateSequence& lrs,
                  std::uint64_t seed,
                  const std::vector<std::int64_t>& record_grid);

}  // namespace schedlaw
