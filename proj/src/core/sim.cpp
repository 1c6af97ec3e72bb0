#include "core/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "core/errors.hpp"

namespace schedlaw {

namespace {

double margin(const ConvexProblem& p) { return p.G_true - p.noise_scale; }

void subgradient_into(const ConvexProblem& p, const std::vector<double>& w,
                      std::vector<double>& g) {
  const auto d = static_cast<std::size_t>(p.d);
  const double a = margin(p);
  switch (p.kind) {
    case ProblemKind::L1Distance: {
      const double s = a / std::sqrt(static_cast<double>(p.d));
      for (std::size_t i = 0; i < d; ++i) {
        const double delta = w[i] - p.w_star[i];
        g[i] = delta > 0.0 ? s : (delta < 0.0 ? -s : 0.0);
      }
      return;
    }
    case ProblemKind::HuberQuadratic: {
      const double s =
          a / (p.huber_delta * std::sqrt(static_cast<double>(p.d)));
      for (std::size_t i = 0; i < d; ++i) {
        const double delta = w[i] - p.w_star[i];
        g[i] = s * std::clamp(delta, -p.huber_delta, p.huber_delta);
      }
      return;
    }
    case ProblemKind::PiecewiseLinearMax: {
      std::size_t arg = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double mag = std::fabs(w[i] - p.w_star[i]);
        if (mag > best) {
          best = mag;
          arg = i;
        }
      }
      std::fill(g.begin(), g.end(), 0.0);
      const double delta = w[arg] - p.w_star[arg];
      g[arg] = delta > 0.0 ? a : (delta < 0.0 ? -a : 0.0);
      return;
    }
  }
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::L1Distance: return "l1_distance";
    case ProblemKind::HuberQuadratic: return "huber_quadratic";
    case ProblemKind::PiecewiseLinearMax: return "piecewise_linear_max";
  }
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "l1_distance") return ProblemKind::L1Distance;
  if (name == "huber_quadratic") return ProblemKind::HuberQuadratic;
  if (name == "piecewise_linear_max") return ProblemKind::PiecewiseLinearMax;
  throw validation_error(
      "unknown problem kind '" + name +
      "' (expected one of: l1_distance, huber_quadratic, "
      "piecewise_linear_max)");
}

void validate(const ConvexProblem& p) {
  if (p.d < 1) throw validation_error("ConvexProblem.d must be >= 1");
  const auto d = static_cast<std::size_t>(p.d);
  if (p.w_star.size() != d || p.w0.size() != d) {
    throw validation_error("ConvexProblem vectors must have length d");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(p.w_star[i]) || !std::isfinite(p.w0[i])) {
      throw validation_error("ConvexProblem vectors must be finite");
    }
  }
  if (!std::isfinite(p.G_true) || p.G_true <= 0.0) {
    throw validation_error("ConvexProblem.G_true must be finite and > 0");
  }
  if (!std::isfinite(p.noise_scale) || p.noise_scale < 0.0) {
    throw validation_error("ConvexProblem.noise_scale must be >= 0");
  }
  if (p.noise_scale >= p.G_true) {
    throw validation_error(
        "noise_scale leaves no deterministic gradient budget (needs "
        "noise_scale < G_true)");
  }
  if (!std::isfinite(p.L_star) || p.L_star < 0.0) {
    throw validation_error("ConvexProblem.L_star must be finite and >= 0");
  }
  if (p.kind == ProblemKind::HuberQuadratic &&
      (!std::isfinite(p.huber_delta) || p.huber_delta <= 0.0)) {
    throw validation_error("ConvexProblem.huber_delta must be > 0");
  }
}

double distance_to_optimum(const ConvexProblem& p) {
  validate(p);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.w_star.size(); ++i) {
    const double delta = p.w0[i] - p.w_star[i];
    acc += delta * delta;
  }
  return std::sqrt(acc);
}

ConvexProblem make_problem(ProblemKind kind, std::int64_t d, double D_target,
                           double G_target, double noise_scale,
                           std::uint64_t seed) {
  if (d < 1) throw validation_error("dimension must be >= 1");
  if (!std::isfinite(D_target) || D_target <= 0.0) {
    throw validation_error("D_target must be finite and > 0");
  }
  if (!std::isfinite(G_target) || G_target <= 0.0) {
    throw validation_error("G_target must be finite and > 0");
  }
  ConvexProblem p;
  p.kind = kind;
  p.d = d;
  p.G_true = G_target;
  p.noise_scale = noise_scale;
  p.L_star = 0.0;
  if (kind == ProblemKind::HuberQuadratic) {
    // Quadratic within D/4 of each coordinate of the optimum, linear beyond:
    // gradients stay bounded while the basin is genuinely smooth.
    p.huber_delta = D_target / (4.0 * std::sqrt(static_cast<double>(d)));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<std::size_t>(d);
  p.w_star.resize(n);
  for (double& v : p.w_star) v = normal(rng);
  std::vector<double> dir(n);
  double norm = 0.0;
  for (double& v : dir) {
    v = normal(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    dir.assign(n, 0.0);
    dir[0] = 1.0;
    norm = 1.0;
  }
  p.w0.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.w0[i] = p.w_star[i] + D_target * dir[i] / norm;
  }
  validate(p);  // rejects noise_scale >= G_target
  return p;
}

double loss_at(const ConvexProblem& p, const std::vector<double>& w) {
  if (w.size() != p.w_star.size()) {
    throw validation_error("loss_at: point has wrong dimension");
  }
  const double a = margin(p);
  double acc = 0.0;
  switch (p.kind) {
    case ProblemKind::L1Distance: {
      for (std::size_t i = 0; i < w.size(); ++i) {
        acc += std::fabs(w[i] - p.w_star[i]);
      }
      acc *= a / std::sqrt(static_cast<double>(p.d));
      break;
    }
    case ProblemKind::HuberQuadratic: {
      const double delta = p.huber_delta;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = std::fabs(w[i] - p.w_star[i]);
        acc += x <= delta ? 0.5 * x * x : delta * (x - 0.5 * delta);
      }
      acc *= a / (delta * std::sqrt(static_cast<double>(p.d)));
      break;
    }
    case ProblemKind::PiecewiseLinearMax: {
      for (std::size_t i = 0; i < w.size(); ++i) {
        acc = std::max(acc, std::fabs(w[i] - p.w_star[i]));
      }
      acc *= a;
      break;
    }
  }
  return p.L_star + acc;
}

SimResult sgd_run(const ConvexProblem& problem, const LearningRateSequence& lrs,
                  std::uint64_t seed,
                  const std::vector<std::int64_t>& record_grid) {
  validate(problem);
  if (lrs.empty()) throw validation_error("learning-rate sequence is empty");
  const auto T = static_cast<std::int64_t>(lrs.size());
  for (double eta : lrs) {
    if (!std::isfinite(eta) || eta < 0.0) {
      throw validation_error("learning rates must be finite and non-negative");
    }
  }
  if (record_grid.empty()) throw validation_error("record grid is empty");
  for (std::size_t i = 0; i < record_grid.size(); ++i) {
    if (record_grid[i] < 1 || record_grid[i] > T ||
        (i > 0 && record_grid[i] <= record_grid[i - 1])) {
      throw validation_error(
          "record grid must be strictly increasing within [1, T]");
    }
  }

  const auto d = static_cast<std::size_t>(problem.d);
  // Separate stream from make_problem's so problem and trajectory noise
  // decouple.
  std::mt19937_64 rng(seed + 1000003ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  SimResult result;
  result.seed = seed;
  result.trace.steps.reserve(record_grid.size());

  std::vector<double> w = problem.w0;
  std::vector<double> wsum(d, 0.0);
  std::vector<double> wavg(d, 0.0);
  std::vector<double> g(d, 0.0);
  std::vector<double> noise(d, 0.0);
  double eta_sum = 0.0;
  double loss_sum = 0.0;

  std::size_t next_record = 0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const double eta = lrs[static_cast<std::size_t>(t - 1)];
    if (eta > 0.0) {
      const double prev_loss = loss_at(problem, w);
      for (std::size_t i = 0; i < d; ++i) wsum[i] += eta * w[i];
      eta_sum += eta;
      loss_sum += eta * prev_loss;

      subgradient_into(problem, w, g);
      if (problem.noise_scale > 0.0) {
        double norm = 0.0;
        for (double& v : noise) {
          v = normal(rng);
          norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
          noise.assign(d, 0.0);
          noise[0] = 1.0;
          norm = 1.0;
        }
        const double radius =
            problem.noise_scale *
            std::pow(uniform(rng), 1.0 / static_cast<double>(problem.d));
        for (std::size_t i = 0; i < d; ++i) g[i] += radius * noise[i] / norm;
      }
      double gnorm = 0.0;
      for (double v : g) gnorm += v * v;
      gnorm = std::sqrt(gnorm);
      result.max_gradient_norm = std::max(result.max_gradient_norm, gnorm);
      if (gnorm > problem.G_true) {
        const double shrink = problem.G_true / gnorm;
        for (double& v : g) v *= shrink;
        ++result.clipped_steps;
      }
      for (std::size_t i = 0; i < d; ++i) w[i] -= eta * g[i];
    }

    if (next_record < record_grid.size() && record_grid[next_record] == t) {
      result.trace.steps.push_back(t);
      result.trace.losses.push_back(loss_at(problem, w));
      result.averaged_trace.steps.push_back(t);
      if (eta_sum > 0.0) {
        for (std::size_t i = 0; i < d; ++i) wavg[i] = wsum[i] / eta_sum;
        result.averaged_trace.losses.push_back(loss_at(problem, wavg));
        result.running_loss_avg.push_back(loss_sum / eta_sum);
      } else {
        // No step taken yet; the averaged iterate is the start point.
        const double l0 = loss_at(problem, problem.w0);
        result.averaged_trace.losses.push_back(l0);
        result.running_loss_avg.push_back(l0);
      }
      ++next_record;
    }
  }
  return result;
}

}  // namespace schedlaw
