#include "schedlaw/schedlaw.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/bound.hpp"
#include "core/continuous.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/fitter.hpp"
#include "core/qualifier.hpp"
#include "core/scaling.hpp"
#include "core/schedule.hpp"
#include "core/sim.hpp"
#include "core/threads.hpp"

#ifndef SCHEDLAW_VERSION
#define SCHEDLAW_VERSION "0.0.0"
#endif

struct schedlaw_schedule {
  schedlaw::ScheduleSpec spec;
};

struct schedlaw_bound_trace {
  schedlaw::BoundTrace trace;
};

struct schedlaw_scaling {
  schedlaw::ScalingFit fit;
};

struct schedlaw_sim {
  nlohmann::json summary;
  std::vector<std::int64_t> grid;
  std::vector<double> mean_last;
  std::vector<double> mean_averaged;
  std::vector<double> grid_rates;
};

namespace {

thread_local std::string g_last_error = "no error";

schedlaw_status fail(schedlaw_status status, const char* message) {
  g_last_error = message;
  return status;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

schedlaw_status emit_string(const std::string& s, char** out) {
  *out = copy_string(s);
  if (*out == nullptr) {
    return fail(SCHEDLAW_ERR_INTERNAL, "out of memory");
  }
  return SCHEDLAW_OK;
}

template <typename Fn>
schedlaw_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const schedlaw::validation_error& e) {
    return fail(SCHEDLAW_ERR_INVALID_ARGUMENT, e.what());
  } catch (const schedlaw::insufficient_data_error& e) {
    return fail(SCHEDLAW_ERR_INSUFFICIENT_DATA, e.what());
  } catch (const schedlaw::numeric_error& e) {
    return fail(SCHEDLAW_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(SCHEDLAW_ERR_INTERNAL, e.what());
  }
}

schedlaw_status require(bool ok, const char* message) {
  return ok ? SCHEDLAW_OK : fail(SCHEDLAW_ERR_INVALID_ARGUMENT, message);
}

}  // namespace

extern "C" {

const char* schedlaw_version(void) { return SCHEDLAW_VERSION; }

const char* schedlaw_last_error(void) { return g_last_error.c_str(); }

void schedlaw_string_free(char* s) { std::free(s); }

schedlaw_status schedlaw_schedule_from_json(const char* json,
                                            schedlaw_schedule** out) {
  if (require(json != nullptr && out != nullptr,
              "schedule_from_json: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto* handle = new schedlaw_schedule{schedlaw::spec_from_json(json)};
    *out = handle;
    return SCHEDLAW_OK;
  });
}

void schedlaw_schedule_free(schedlaw_schedule* schedule) { delete schedule; }

schedlaw_status schedlaw_schedule_to_json(const schedlaw_schedule* schedule,
                                          char** out) {
  if (require(schedule != nullptr && out != nullptr,
              "schedule_to_json: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { return emit_string(schedlaw::spec_to_json(schedule->spec), out); });
}

int64_t schedlaw_schedule_horizon(const schedlaw_schedule* schedule) {
  return schedule == nullptr ? 0 : schedule->spec.T;
}

schedlaw_status schedlaw_schedule_rates(const schedlaw_schedule* schedule,
                                        double* out) {
  if (require(schedule != nullptr && out != nullptr,
              "schedule_rates: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const schedlaw::LearningRateSequence rates =
        schedlaw::eval_discrete(schedule->spec);
    std::memcpy(out, rates.data(), rates.size() * sizeof(double));
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_schedule_rates_csv(const schedlaw_schedule* schedule,
                                            char** out) {
  if (require(schedule != nullptr && out != nullptr,
              "schedule_rates_csv: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    return emit_string(
        schedlaw::sequence_to_csv(schedlaw::eval_discrete(schedule->spec)),
        out);
  });
}

schedlaw_status schedlaw_log_tau_grid(int64_t T, int64_t points, int64_t* out,
                                      size_t* out_len) {
  if (require(out != nullptr && out_len != nullptr,
              "log_tau_grid: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::vector<std::int64_t> grid = schedlaw::log_tau_grid(T, points);
    std::memcpy(out, grid.data(), grid.size() * sizeof(int64_t));
    *out_len = grid.size();
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_bound_trace_compute(
    const schedlaw_schedule* schedule, double L_star, double D, double G,
    const char* kind, const int64_t* tau_grid, size_t grid_len,
    schedlaw_bound_trace** out) {
  if (require(schedule != nullptr && kind != nullptr && tau_grid != nullptr &&
                  out != nullptr,
              "bound_trace_compute: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    schedlaw::BoundCoefficients coeffs;
    coeffs.L_star = L_star;
    coeffs.D = D;
    coeffs.G = G;
    const std::vector<std::int64_t> grid(tau_grid, tau_grid + grid_len);
    auto* handle = new schedlaw_bound_trace{schedlaw::bound_trace(
        coeffs, schedule->spec, grid, schedlaw::bound_kind_from_string(kind))};
    *out = handle;
    return SCHEDLAW_OK;
  });
}

void schedlaw_bound_trace_free(schedlaw_bound_trace* trace) { delete trace; }

size_t schedlaw_bound_trace_size(const schedlaw_bound_trace* trace) {
  return trace == nullptr ? 0 : trace->trace.tau_grid.size();
}

schedlaw_status schedlaw_bound_trace_values(const schedlaw_bound_trace* trace,
                                            int64_t* taus, double* values) {
  if (require(trace != nullptr && taus != nullptr && values != nullptr,
              "bound_trace_values: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  std::memcpy(taus, trace->trace.tau_grid.data(),
              trace->trace.tau_grid.size() * sizeof(int64_t));
  std::memcpy(values, trace->trace.values.data(),
              trace->trace.values.size() * sizeof(double));
  return SCHEDLAW_OK;
}

schedlaw_status schedlaw_bound_trace_csv(const schedlaw_bound_trace* trace,
                                         char** out) {
  if (require(trace != nullptr && out != nullptr,
              "bound_trace_csv: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { return emit_string(schedlaw::bound_trace_to_csv(trace->trace), out); });
}

schedlaw_status schedlaw_closed_form_bound(const char* kind, double L_star,
                                           double D, double G, double eta_peak,
                                           double T, double wsd_c,
                                           double* out) {
  if (require(kind != nullptr && out != nullptr,
              "closed_form_bound: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    schedlaw::BoundCoefficients coeffs;
    coeffs.L_star = L_star;
    coeffs.D = D;
    coeffs.G = G;
    *out = schedlaw::closed_form_bound(schedlaw::kind_from_string(kind), coeffs,
                                       eta_peak, T, wsd_c);
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_optimal_peak_lr(const char* kind, double L_star,
                                         double D, double G, double T,
                                         double wsd_c, double* eta_star,
                                         double* bound_star, char** formula) {
  if (require(kind != nullptr && eta_star != nullptr && bound_star != nullptr,
              "optimal_peak_lr: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    schedlaw::BoundCoefficients coeffs;
    coeffs.L_star = L_star;
    coeffs.D = D;
    coeffs.G = G;
    const schedlaw::OptimalLr opt = schedlaw::optimal_peak_lr(
        schedlaw::kind_from_string(kind), coeffs, T, wsd_c);
    *eta_star = opt.eta_star;
    *bound_star = opt.bound_star;
    if (formula != nullptr) {
      return emit_string(opt.formula, formula);
    }
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_qualify(const char* kind, double wsd_c,
                                 double warmup_frac, int64_t cycles,
                                 const int64_t* T_grid, size_t grid_len,
                                 double delta, double D, double G,
                                 int* out_qualified, char** out_json) {
  if (require(kind != nullptr, "qualify: null kind") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    schedlaw::ScheduleFamily family;
    family.kind = schedlaw::kind_from_string(kind);
    family.wsd_c = wsd_c;
    family.warmup_frac = warmup_frac;
    family.cycles = cycles;
    std::vector<std::int64_t> grid;
    if (T_grid != nullptr && grid_len > 0) {
      grid.assign(T_grid, T_grid + grid_len);
    } else {
      grid = schedlaw::default_exam_grid();
    }
    const schedlaw::QualifyReport report =
        schedlaw::qualify(family, grid, delta, D, G);
    if (out_qualified != nullptr) {
      *out_qualified = report.verdict == schedlaw::Verdict::Qualified ? 1 : 0;
    }
    if (out_json != nullptr) {
      return emit_string(schedlaw::qualify_report_to_json(report), out_json);
    }
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_fit_trace(const char* trace_csv,
                                   const schedlaw_schedule* schedule,
                                   double split_frac, int64_t smoothing_window,
                                   int64_t t_min, char** out_json) {
  if (require(trace_csv != nullptr && out_json != nullptr,
              "fit_trace: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const schedlaw::LossTrace trace = schedlaw::trace_from_csv(trace_csv);
    schedlaw::LearningRateSequence rates;
    if (schedule != nullptr) {
      rates = schedlaw::eval_discrete(schedule->spec);
    }
    schedlaw::FitOptions opts;
    opts.split_frac = split_frac;
    opts.smoothing_window = smoothing_window;
    opts.t_min = t_min;
    const schedlaw::FitReport report =
        schedlaw::fit_predict(trace, rates, opts);
    return emit_string(schedlaw::fit_report_to_json(report), out_json);
  });
}

schedlaw_status schedlaw_scaling_fit_records(const char* records_csv,
                                             int64_t t_min_cutoff,
                                             int interpolate,
                                             schedlaw_scaling** out) {
  if (require(records_csv != nullptr && out != nullptr,
              "scaling_fit_records: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::vector<schedlaw::RunRecord> records =
        schedlaw::records_from_csv(records_csv);
    const std::int64_t cutoff =
        t_min_cutoff > 0 ? t_min_cutoff : schedlaw::kDefaultTMinCutoff;
    auto* handle = new schedlaw_scaling{
        schedlaw::scaling_fit(records, cutoff, interpolate != 0)};
    *out = handle;
    return SCHEDLAW_OK;
  });
}

void schedlaw_scaling_free(schedlaw_scaling* fit) { delete fit; }

schedlaw_status schedlaw_scaling_to_json(const schedlaw_scaling* fit,
                                         char** out) {
  if (require(fit != nullptr && out != nullptr,
              "scaling_to_json: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { return emit_string(schedlaw::scaling_fit_to_json(fit->fit), out); });
}

schedlaw_status schedlaw_scaling_predict(const schedlaw_scaling* fit,
                                         double T_target, double* out) {
  if (require(fit != nullptr && out != nullptr,
              "scaling_predict: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = schedlaw::predict_loss(fit->fit, T_target);
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_scaling_prediction_csv(const schedlaw_scaling* fit,
                                                const double* horizons,
                                                size_t n, char** out) {
  if (require(fit != nullptr && horizons != nullptr && out != nullptr,
              "scaling_prediction_csv: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      rows.emplace_back(horizons[i],
                        schedlaw::predict_loss(fit->fit, horizons[i]));
    }
    return emit_string(schedlaw::prediction_table_to_csv(rows), out);
  });
}

schedlaw_status schedlaw_transfer_lr(double eta_peak_small, double T_small,
                                     double T_target, double* out_eta,
                                     int* out_warning) {
  if (require(out_eta != nullptr, "transfer_lr: null output") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const schedlaw::TransferResult result =
        schedlaw::transfer_lr(eta_peak_small, T_small, T_target);
    *out_eta = result.eta_peak;
    if (out_warning != nullptr) {
      *out_warning = result.extrapolation_warning ? 1 : 0;
    }
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_flops_to_tokens(double flops, double model_size,
                                         double* out) {
  if (require(out != nullptr, "flops_to_tokens: null output") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = schedlaw::flops_to_tokens(flops, model_size);
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_tokens_to_steps(double tokens, double batch_size,
                                         double* out) {
  if (require(out != nullptr, "tokens_to_steps: null output") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = schedlaw::tokens_to_steps(tokens, batch_size);
    return SCHEDLAW_OK;
  });
}

schedlaw_status schedlaw_sim_run(const char* problem_kind, int64_t d, double D,
                                 double G, double noise_scale,
                                 const schedlaw_schedule* schedule,
                                 uint64_t seed_base, int64_t seeds,
                                 const int64_t* record_grid, size_t grid_len,
                                 schedlaw_sim** out) {
  if (require(problem_kind != nullptr && schedule != nullptr &&
                  record_grid != nullptr && out != nullptr,
              "sim_run: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    if (seeds < 1) {
      throw schedlaw::validation_error("sim_run: seeds must be >= 1");
    }
    const schedlaw::ProblemKind kind =
        schedlaw::problem_kind_from_string(problem_kind);
    const schedlaw::LearningRateSequence rates =
        schedlaw::eval_discrete(schedule->spec);
    const std::vector<std::int64_t> grid(record_grid, record_grid + grid_len);

    const auto n_seeds = static_cast<std::size_t>(seeds);
    std::vector<schedlaw::SimResult> results(n_seeds);
    std::vector<std::string> failures(n_seeds);
    schedlaw::parallel_for(seeds, [&](std::int64_t i) {
      const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(i);
      try {
        const schedlaw::ConvexProblem problem =
            schedlaw::make_problem(kind, d, D, G, noise_scale, seed);
        results[static_cast<std::size_t>(i)] =
            schedlaw::sgd_run(problem, rates, seed, grid);
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(i)] = e.what();
      }
    });
    for (const std::string& f : failures) {
      if (!f.empty()) throw schedlaw::validation_error(f);
    }

    auto* sim = new schedlaw_sim;
    sim->grid = grid;
    const std::size_t points = grid.size();
    std::vector<double> stderr_last(points, 0.0), stderr_avg(points, 0.0);
    sim->mean_last.assign(points, 0.0);
    sim->mean_averaged.assign(points, 0.0);
    std::int64_t clipped = 0;
    double max_norm = 0.0;
    for (const schedlaw::SimResult& r : results) {
      clipped += r.clipped_steps;
      max_norm = std::max(max_norm, r.max_gradient_norm);
      for (std::size_t p = 0; p < points; ++p) {
        sim->mean_last[p] += r.trace.losses[p];
        sim->mean_averaged[p] += r.averaged_trace.losses[p];
      }
    }
    for (std::size_t p = 0; p < points; ++p) {
      sim->mean_last[p] /= static_cast<double>(n_seeds);
      sim->mean_averaged[p] /= static_cast<double>(n_seeds);
    }
    if (n_seeds > 1) {
      for (const schedlaw::SimResult& r : results) {
        for (std::size_t p = 0; p < points; ++p) {
          const double dl = r.trace.losses[p] - sim->mean_last[p];
          const double da = r.averaged_trace.losses[p] - sim->mean_averaged[p];
          stderr_last[p] += dl * dl;
          stderr_avg[p] += da * da;
        }
      }
      for (std::size_t p = 0; p < points; ++p) {
        stderr_last[p] = std::sqrt(stderr_last[p] /
                                   static_cast<double>(n_seeds - 1)) /
                         std::sqrt(static_cast<double>(n_seeds));
        stderr_avg[p] = std::sqrt(stderr_avg[p] /
                                  static_cast<double>(n_seeds - 1)) /
                        std::sqrt(static_cast<double>(n_seeds));
      }
    }
    sim->grid_rates.resize(points);
    for (std::size_t p = 0; p < points; ++p) {
      sim->grid_rates[p] =
          rates[static_cast<std::size_t>(grid[p] - 1)];
    }

    nlohmann::json j;
    j["problem"]["kind"] = schedlaw::to_string(kind);
    j["problem"]["d"] = d;
    j["problem"]["D_true"] = D;
    j["problem"]["G_true"] = G;
    j["problem"]["noise_scale"] = noise_scale;
    j["problem"]["L_star"] = 0.0;
    j["seed_base"] = seed_base;
    j["seeds"] = seeds;
    j["grid"] = sim->grid;
    j["mean_last"] = sim->mean_last;
    j["stderr_last"] = stderr_last;
    j["mean_averaged"] = sim->mean_averaged;
    j["stderr_averaged"] = stderr_avg;
    j["clipped_steps"] = clipped;
    j["max_gradient_norm"] = max_norm;
    sim->summary = std::move(j);
    *out = sim;
    return SCHEDLAW_OK;
  });
}

void schedlaw_sim_free(schedlaw_sim* sim) { delete sim; }

schedlaw_status schedlaw_sim_mean_trace_csv(const schedlaw_sim* sim,
                                            const char* iterate,
                                            int include_lr, char** out) {
  if (require(sim != nullptr && iterate != nullptr && out != nullptr,
              "sim_mean_trace_csv: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::string which = iterate;
    schedlaw::LossTrace trace;
    trace.steps = sim->grid;
    if (which == "last") {
      trace.losses = sim->mean_last;
    } else if (which == "averaged") {
      trace.losses = sim->mean_averaged;
    } else {
      throw schedlaw::validation_error(
          "iterate must be 'last' or 'averaged'");
    }
    if (include_lr != 0) trace.lrs = sim->grid_rates;
    return emit_string(schedlaw::trace_to_csv(trace), out);
  });
}

schedlaw_status schedlaw_sim_summary_json(const schedlaw_sim* sim,
                                          char** out) {
  if (require(sim != nullptr && out != nullptr,
              "sim_summary_json: null argument") != SCHEDLAW_OK) {
    return SCHEDLAW_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { return emit_string(sim->summary.dump(2), out); });
}

}  // extern "C"
