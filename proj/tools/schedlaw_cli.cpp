// schedlaw command-line tool. Talks to the shared library through the C API
// only; everything here is argument plumbing, file IO, and rendering.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "schedlaw/schedlaw.h"

namespace {

using nlohmann::json;

struct CliError {
  int code;
  std::string message;
};

int exit_code(schedlaw_status status) {
  switch (status) {
    case SCHEDLAW_OK:
      return 0;
    case SCHEDLAW_ERR_INVALID_ARGUMENT:
      return 1;
    default:
      return 2;  // numeric failures and insufficient data
  }
}

void check(schedlaw_status status) {
  if (status != SCHEDLAW_OK) {
    throw CliError{exit_code(status), schedlaw_last_error()};
  }
}

// Owns a string allocated by the library.
struct CStr {
  char* ptr = nullptr;
  ~CStr() { schedlaw_string_free(ptr); }
  std::string str() const { return ptr == nullptr ? std::string() : ptr; }
};

// Owns a schedule handle.
struct Schedule {
  schedlaw_schedule* handle = nullptr;
  ~Schedule() { schedlaw_schedule_free(handle); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{1, "cannot open input file '" + path + "'"};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CliError{1, "cannot open output file '" + path + "'"};
  out << content;
  if (!out) throw CliError{1, "failed writing '" + path + "'"};
}

// Accepts either inline JSON (starts with '{') or a path to a JSON file.
Schedule load_schedule(const std::string& arg) {
  std::string text = arg;
  if (text.empty() || text[0] != '{') text = read_file(arg);
  Schedule schedule;
  check(schedlaw_schedule_from_json(text.c_str(), &schedule.handle));
  return schedule;
}

// Grid syntax: "all", "log:N", or "lin:N".
std::vector<int64_t> parse_grid(const std::string& spec, int64_t T) {
  if (T < 1) throw CliError{1, "grid horizon must be >= 1"};
  if (spec == "all") {
    std::vector<int64_t> grid(static_cast<std::size_t>(T));
    for (int64_t i = 0; i < T; ++i) grid[static_cast<std::size_t>(i)] = i + 1;
    return grid;
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw CliError{1, "grid must be 'all', 'log:N', or 'lin:N', got '" +
                          spec + "'"};
  }
  const std::string mode = spec.substr(0, colon);
  int64_t points = 0;
  try {
    points = std::stoll(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw CliError{1, "invalid grid size in '" + spec + "'"};
  }
  if (points < 1) throw CliError{1, "grid size must be >= 1"};
  if (mode == "log") {
    std::vector<int64_t> grid(static_cast<std::size_t>(points));
    size_t len = 0;
    check(schedlaw_log_tau_grid(T, points, grid.data(), &len));
    grid.resize(len);
    return grid;
  }
  if (mode == "lin") {
    std::vector<int64_t> grid;
    for (int64_t i = 1; i <= points; ++i) {
      const auto tau = static_cast<int64_t>(
          (static_cast<double>(i) / static_cast<double>(points)) *
          static_cast<double>(T));
      grid.push_back(std::max<int64_t>(1, tau));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
  }
  throw CliError{1, "unknown grid mode '" + mode + "'"};
}

// Minimal plot: axes, min/max tick labels, one polyline.
std::string render_svg(const std::vector<double>& xs,
                       const std::vector<double>& ys,
                       const std::string& x_label,
                       const std::string& y_label) {
  const double W = 640.0, H = 480.0;
  const double ml = 80.0, mr = 20.0, mt = 20.0, mb = 50.0;
  double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xmin = std::min(xmin, xs[i]);
    xmax = std::max(xmax, xs[i]);
    ymin = std::min(ymin, ys[i]);
    ymax = std::max(ymax, ys[i]);
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  const double pad = (ymax - ymin) * 0.05;
  ymin -= pad;
  ymax += pad;
  if (ymax == ymin) ymax = ymin + 1.0;
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double y) {
    return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
  };
  char buf[256];
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"480\" viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                ml, H - mb, W - mr, H - mb);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                ml, mt, ml, H - mb);
  svg += buf;
  svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
         "points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i == 0 ? "" : " ",
                  px(xs[i]), py(ys[i]));
    svg += buf;
  }
  svg += "\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">%.6g</text>\n",
                ml, H - mb + 16.0, xmin);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                "text-anchor=\"end\">%.6g</text>\n",
                W - mr, H - mb + 16.0, xmax);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                "text-anchor=\"end\">%.6g</text>\n",
                ml - 6.0, H - mb, ymin);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" "
                "text-anchor=\"end\">%.6g</text>\n",
                ml - 6.0, mt + 10.0, ymax);
  svg += buf;
  std::snprintf(
      buf, sizeof(buf),
      "<text x=\"%.2f\" y=\"%.2f\" font-size=\"13\" "
      "text-anchor=\"middle\">%s</text>\n",
      ml + (W - ml - mr) / 2.0, H - 12.0, x_label.c_str());
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"16\" y=\"%.2f\" font-size=\"13\" "
                "transform=\"rotate(-90 16 %.2f)\" "
                "text-anchor=\"middle\">%s</text>\n",
                mt + (H - mt - mb) / 2.0, mt + (H - mt - mb) / 2.0,
                y_label.c_str());
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

std::string swap_extension(const std::string& path, const std::string& ext) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  std::string swapped;
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    swapped = path + ext;
  } else {
    swapped = path.substr(0, dot) + ext;
  }
  if (swapped == path) swapped = path + ext;
  return swapped;
}

json report_envelope(const std::string& subcommand, const json& config) {
  json j;
  j["tool"] = "schedlaw";
  j["version"] = schedlaw_version();
  j["subcommand"] = subcommand;
  j["config"] = config;
  return j;
}

// Writes the JSON report (plus optional sibling artifact) or prints to
// stdout. `artifact` is empty for json-only subcommand output.
void emit(const std::string& out_path, const std::string& format, json report,
          const std::string& artifact, const std::string& artifact_ext) {
  if (!out_path.empty()) {
    if (!artifact.empty()) {
      const std::string artifact_path = swap_extension(out_path, artifact_ext);
      write_file(artifact_path, artifact);
      report["artifact"] = artifact_path;
    }
    write_file(out_path, report.dump(2) + "\n");
    return;
  }
  if (format == "json" || artifact.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << artifact;
  }
}

// ---------- subcommands ----------

struct BoundArgs {
  std::string schedule;
  double L_star = 0.0, D = 1.0, G = 1.0;
  std::string kind = "last";
  std::string grid = "log:1000";
  std::string out, format = "csv";
};

int run_bound(const BoundArgs& args) {
  Schedule schedule = load_schedule(args.schedule);
  const int64_t T = schedlaw_schedule_horizon(schedule.handle);
  const std::vector<int64_t> grid = parse_grid(args.grid, T);

  schedlaw_bound_trace* raw = nullptr;
  check(schedlaw_bound_trace_compute(schedule.handle, args.L_star, args.D,
                                     args.G, args.kind.c_str(), grid.data(),
                                     grid.size(), &raw));
  struct Trace {
    schedlaw_bound_trace* t;
    ~Trace() { schedlaw_bound_trace_free(t); }
  } trace{raw};

  const size_t n = schedlaw_bound_trace_size(trace.t);
  std::vector<int64_t> taus(n);
  std::vector<double> values(n);
  check(schedlaw_bound_trace_values(trace.t, taus.data(), values.data()));

  CStr spec_json;
  check(schedlaw_schedule_to_json(schedule.handle, &spec_json.ptr));
  json config;
  config["schedule"] = json::parse(spec_json.str());
  config["L_star"] = args.L_star;
  config["D"] = args.D;
  config["G"] = args.G;
  config["kind"] = args.kind;
  config["grid"] = args.grid;
  config["format"] = args.format;
  json report = report_envelope("bound", config);
  report["tau"] = taus;
  report["bound"] = values;

  std::string artifact;
  std::string ext;
  if (args.format == "csv") {
    CStr csv;
    check(schedlaw_bound_trace_csv(trace.t, &csv.ptr));
    artifact = csv.str();
    ext = ".csv";
  } else if (args.format == "svg") {
    std::vector<double> xs(taus.begin(), taus.end());
    artifact = render_svg(xs, values, "tau", "bound");
    ext = ".svg";
  } else if (args.format != "json") {
    throw CliError{1, "format must be json, csv, or svg"};
  }
  emit(args.out, args.format, report, artifact, ext);
  return 0;
}

struct QualifyArgs {
  std::string kind;
  double c = 0.8, warmup_frac = 0.0;
  int64_t cycles = 1;
  std::string exam_grid;  // comma-separated horizons, empty = default
  double delta = 0.02, D = 1.0, G = 1.0;
  std::string out, format = "json";
};

int run_qualify(const QualifyArgs& args) {
  std::vector<int64_t> grid;
  if (!args.exam_grid.empty()) {
    std::stringstream ss(args.exam_grid);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        grid.push_back(std::stoll(item));
      } catch (const std::exception&) {
        throw CliError{1, "invalid exam grid entry '" + item + "'"};
      }
    }
  }
  int qualified = 0;
  CStr report_json;
  check(schedlaw_qualify(args.kind.c_str(), args.c, args.warmup_frac,
                         args.cycles, grid.empty() ? nullptr : grid.data(),
                         grid.size(), args.delta, args.D, args.G, &qualified,
                         &report_json.ptr));
  json config;
  config["kind"] = args.kind;
  if (args.kind == "wsd") config["c"] = args.c;
  if (args.warmup_frac > 0.0) config["warmup_frac"] = args.warmup_frac;
  if (args.kind == "cyclic") config["cycles"] = args.cycles;
  config["delta"] = args.delta;
  config["D"] = args.D;
  config["G"] = args.G;
  config["exam_grid"] = args.exam_grid.empty() ? "default" : args.exam_grid;
  config["format"] = args.format;
  json report = report_envelope("qualify", config);
  report["report"] = json::parse(report_json.str());
  if (args.format != "json") throw CliError{1, "qualify only emits json"};
  emit(args.out, args.format, report, "", "");
  return 0;
}

struct FitArgs {
  std::string trace;
  std::string schedule;  // optional
  double split = 0.5;
  int64_t smoothing_window = 0, t_min = 0;
  std::string out, format = "json";
};

int run_fit(const FitArgs& args) {
  const std::string trace_csv = read_file(args.trace);
  Schedule schedule;
  json schedule_config;
  if (!args.schedule.empty()) {
    schedule = load_schedule(args.schedule);
    CStr spec_json;
    check(schedlaw_schedule_to_json(schedule.handle, &spec_json.ptr));
    schedule_config = json::parse(spec_json.str());
  }
  CStr fit_json;
  check(schedlaw_fit_trace(trace_csv.c_str(), schedule.handle, args.split,
                           args.smoothing_window, args.t_min, &fit_json.ptr));
  json config;
  config["trace"] = args.trace;
  if (!schedule_config.is_null()) config["schedule"] = schedule_config;
  config["split"] = args.split;
  config["smoothing_window"] = args.smoothing_window;
  config["t_min"] = args.t_min;
  config["format"] = args.format;
  json report = report_envelope("fit", config);
  report["report"] = json::parse(fit_json.str());
  if (args.format != "json") throw CliError{1, "fit only emits json"};
  emit(args.out, args.format, report, "", "");
  return 0;
}

struct ScaleArgs {
  std::string records;
  int64_t t_min = 0;  // 0 = library default cutoff
  bool interpolate = false;
  std::string grid = "log:50";
  std::string out, format = "json";
};

int run_scale(const ScaleArgs& args) {
  const std::string records_csv = read_file(args.records);
  schedlaw_scaling* raw = nullptr;
  check(schedlaw_scaling_fit_records(records_csv.c_str(), args.t_min,
                                     args.interpolate ? 1 : 0, &raw));
  struct Fit {
    schedlaw_scaling* f;
    ~Fit() { schedlaw_scaling_free(f); }
  } fit{raw};

  CStr fit_json;
  check(schedlaw_scaling_to_json(fit.f, &fit_json.ptr));
  const json scaling = json::parse(fit_json.str());

  json config;
  config["records"] = args.records;
  config["t_min"] = args.t_min;
  config["interpolate"] = args.interpolate;
  config["grid"] = args.grid;
  config["format"] = args.format;
  json report = report_envelope("scale", config);
  report["scaling"] = scaling;

  std::string artifact;
  if (args.format == "csv") {
    // Prediction table across the fitted range, extended one decade up.
    const double lo = scaling.at("horizon_min").get<double>();
    const double hi = scaling.at("horizon_max").get<double>() * 10.0;
    const auto colon = args.grid.find(':');
    int64_t points = 50;
    if (colon != std::string::npos) {
      try {
        points = std::stoll(args.grid.substr(colon + 1));
      } catch (const std::exception&) {
        throw CliError{1, "invalid grid size in '" + args.grid + "'"};
      }
    }
    if (points < 2) throw CliError{1, "prediction grid needs >= 2 points"};
    std::vector<double> horizons(static_cast<std::size_t>(points));
    for (int64_t i = 0; i < points; ++i) {
      const double frac =
          static_cast<double>(i) / static_cast<double>(points - 1);
      horizons[static_cast<std::size_t>(i)] =
          lo * std::pow(hi / lo, frac);
    }
    CStr table;
    check(schedlaw_scaling_prediction_csv(fit.f, horizons.data(),
                                          horizons.size(), &table.ptr));
    artifact = table.str();
  } else if (args.format != "json") {
    throw CliError{1, "format must be json or csv"};
  }
  emit(args.out, args.format, report, artifact, ".csv");
  return 0;
}

struct PredictArgs {
  std::string records;
  double T = 0.0;
  int64_t t_min = 0;
  bool interpolate = false;
  double eta_small = 0.0, T_small = 0.0;
  std::string out, format = "json";
};

int run_predict(const PredictArgs& args) {
  const std::string records_csv = read_file(args.records);
  schedlaw_scaling* raw = nullptr;
  check(schedlaw_scaling_fit_records(records_csv.c_str(), args.t_min,
                                     args.interpolate ? 1 : 0, &raw));
  struct Fit {
    schedlaw_scaling* f;
    ~Fit() { schedlaw_scaling_free(f); }
  } fit{raw};

  double loss = 0.0;
  check(schedlaw_scaling_predict(fit.f, args.T, &loss));
  CStr fit_json;
  check(schedlaw_scaling_to_json(fit.f, &fit_json.ptr));

  json config;
  config["records"] = args.records;
  config["T"] = args.T;
  config["t_min"] = args.t_min;
  config["interpolate"] = args.interpolate;
  config["format"] = args.format;
  json report = report_envelope("predict", config);
  report["scaling"] = json::parse(fit_json.str());
  report["predicted_loss"] = loss;
  if (args.eta_small > 0.0 || args.T_small > 0.0) {
    config["eta_small"] = args.eta_small;
    config["T_small"] = args.T_small;
    report["config"] = config;
    double eta = 0.0;
    int warning = 0;
    check(schedlaw_transfer_lr(args.eta_small, args.T_small, args.T, &eta,
                               &warning));
    report["transfer"]["eta_peak"] = eta;
    report["transfer"]["extrapolation_warning"] = warning != 0;
  }
  if (args.format != "json") throw CliError{1, "predict only emits json"};
  emit(args.out, args.format, report, "", "");
  return 0;
}

struct SimulateArgs {
  std::string problem = "l1_distance";
  int64_t d = 1;
  double D = 1.0, G = 1.0, noise = 0.0;
  std::string schedule;
  int64_t seeds = 1;
  uint64_t seed_base = 1;
  std::string grid = "log:100";
  std::string iterate = "last";
  std::string out, format = "csv";
};

int run_simulate(const SimulateArgs& args) {
  Schedule schedule = load_schedule(args.schedule);
  const int64_t T = schedlaw_schedule_horizon(schedule.handle);
  const std::vector<int64_t> grid = parse_grid(args.grid, T);

  schedlaw_sim* raw = nullptr;
  check(schedlaw_sim_run(args.problem.c_str(), args.d, args.D, args.G,
                         args.noise, schedule.handle, args.seed_base,
                         args.seeds, grid.data(), grid.size(), &raw));
  struct Sim {
    schedlaw_sim* s;
    ~Sim() { schedlaw_sim_free(s); }
  } sim{raw};

  CStr summary;
  check(schedlaw_sim_summary_json(sim.s, &summary.ptr));
  CStr spec_json;
  check(schedlaw_schedule_to_json(schedule.handle, &spec_json.ptr));

  json config;
  config["problem"] = args.problem;
  config["d"] = args.d;
  config["D"] = args.D;
  config["G"] = args.G;
  config["noise"] = args.noise;
  config["schedule"] = json::parse(spec_json.str());
  config["seeds"] = args.seeds;
  config["seed_base"] = args.seed_base;
  config["grid"] = args.grid;
  config["iterate"] = args.iterate;
  config["format"] = args.format;
  json report = report_envelope("simulate", config);
  report["summary"] = json::parse(summary.str());

  std::string artifact;
  if (args.format == "csv") {
    CStr csv;
    check(schedlaw_sim_mean_trace_csv(sim.s, args.iterate.c_str(), 1,
                                      &csv.ptr));
    artifact = csv.str();
  } else if (args.format != "json") {
    throw CliError{1, "format must be json or csv"};
  }
  emit(args.out, args.format, report, artifact, ".csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"schedlaw: loss bounds, schedule exams, trace fits, and "
               "scaling laws for learning-rate schedules"};
  app.require_subcommand(1);

  BoundArgs bound_args;
  auto* bound = app.add_subcommand(
      "bound", "Evaluate a loss-bound curve over training steps");
  bound->add_option("--schedule", bound_args.schedule,
                    "Schedule JSON (path or inline)")->required();
  bound->add_option("--L-star", bound_args.L_star, "Irreducible loss");
  bound->add_option("--D", bound_args.D, "Initial-distance coefficient");
  bound->add_option("--G", bound_args.G, "Gradient-norm coefficient");
  bound->add_option("--kind", bound_args.kind, "Bound kind: last | averaged");
  bound->add_option("--grid", bound_args.grid, "Tau grid: all | log:N | lin:N");
  bound->add_option("--out", bound_args.out, "Report path (stdout if absent)");
  bound->add_option("--format", bound_args.format, "json | csv | svg");

  QualifyArgs qualify_args;
  auto* qualify = app.add_subcommand(
      "qualify", "Exam a schedule family for the optimal decay rate");
  qualify->add_option("--kind", qualify_args.kind, "Schedule kind")->required();
  qualify->add_option("--c", qualify_args.c, "WSD stable fraction");
  qualify->add_option("--warmup-frac", qualify_args.warmup_frac,
                      "Linear warmup fraction");
  qualify->add_option("--cycles", qualify_args.cycles, "Cyclic cycle count");
  qualify->add_option("--exam-grid", qualify_args.exam_grid,
                      "Comma-separated horizons (default 1e3..1e7)");
  qualify->add_option("--delta", qualify_args.delta, "Exponent tolerance");
  qualify->add_option("--D", qualify_args.D, "Distance coefficient");
  qualify->add_option("--G", qualify_args.G, "Gradient coefficient");
  qualify->add_option("--out", qualify_args.out, "Report path");
  qualify->add_option("--format", qualify_args.format, "json");

  FitArgs fit_args;
  auto* fit = app.add_subcommand(
      "fit", "Fit bound coefficients to a recorded loss trace");
  fit->add_option("--trace", fit_args.trace, "Loss trace CSV")->required();
  fit->add_option("--schedule", fit_args.schedule,
                  "Schedule JSON (path or inline); optional when the trace "
                  "has an lr column");
  fit->add_option("--split", fit_args.split, "Fit fraction of the horizon");
  fit->add_option("--smoothing-window", fit_args.smoothing_window,
                  "Moving-average window (0 = auto)");
  fit->add_option("--t-min", fit_args.t_min, "Drop steps below this");
  fit->add_option("--out", fit_args.out, "Report path");
  fit->add_option("--format", fit_args.format, "json");

  ScaleArgs scale_args;
  auto* scale = app.add_subcommand(
      "scale", "Fit the loss/learning-rate scaling law to run records");
  scale->add_option("--records", scale_args.records, "Run records CSV")
      ->required();
  scale->add_option("--t-min", scale_args.t_min,
                    "Horizon cutoff (0 = default 2501)");
  scale->add_flag("--interpolate", scale_args.interpolate,
                  "Interpolate the Q curve instead of grid argmin");
  scale->add_option("--grid", scale_args.grid,
                    "Prediction table size for csv output (log:N)");
  scale->add_option("--out", scale_args.out, "Report path");
  scale->add_option("--format", scale_args.format, "json | csv");

  PredictArgs predict_args;
  auto* predict = app.add_subcommand(
      "predict", "Predict loss at a target horizon from run records");
  predict->add_option("--records", predict_args.records, "Run records CSV")
      ->required();
  predict->add_option("--T", predict_args.T, "Target horizon")->required();
  predict->add_option("--t-min", predict_args.t_min,
                      "Horizon cutoff (0 = default 2501)");
  predict->add_flag("--interpolate", predict_args.interpolate,
                    "Interpolate the Q curve");
  predict->add_option("--eta-small", predict_args.eta_small,
                      "Known peak rate at --T-small, to transfer");
  predict->add_option("--T-small", predict_args.T_small,
                      "Horizon where --eta-small was tuned");
  predict->add_option("--out", predict_args.out, "Report path");
  predict->add_option("--format", predict_args.format, "json");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand(
      "simulate", "Run seeded SGD on a convex test problem");
  simulate->add_option("--problem", sim_args.problem,
                       "l1_distance | huber_quadratic | piecewise_linear_max");
  simulate->add_option("--d", sim_args.d, "Dimension");
  simulate->add_option("--D", sim_args.D, "Start distance to the optimum");
  simulate->add_option("--G", sim_args.G, "Gradient-norm bound");
  simulate->add_option("--noise", sim_args.noise, "Gradient noise radius");
  simulate->add_option("--schedule", sim_args.schedule,
                       "Schedule JSON (path or inline)")->required();
  simulate->add_option("--seeds", sim_args.seeds, "Number of seeds");
  simulate->add_option("--seed-base", sim_args.seed_base, "First seed");
  simulate->add_option("--grid", sim_args.grid,
                       "Record grid: all | log:N | lin:N");
  simulate->add_option("--iterate", sim_args.iterate, "last | averaged");
  simulate->add_option("--out", sim_args.out, "Report path");
  simulate->add_option("--format", sim_args.format, "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (bound->parsed()) return run_bound(bound_args);
    if (qualify->parsed()) return run_qualify(qualify_args);
    if (fit->parsed()) return run_fit(fit_args);
    if (scale->parsed()) return run_scale(scale_args);
    if (predict->parsed()) return run_predict(predict_args);
    if (simulate->parsed()) return run_simulate(sim_args);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
