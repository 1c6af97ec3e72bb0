#include "core/schedule.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "core/errors.hpp"

namespace schedlaw {

namespace {

using json = nlohmann::json;

constexpr double kPi = std::numbers::pi;

// Shape s(t) on [0, T] with s in [0, 1], before warmup composition.
double base_shape(Kind kind, double t, double T, double wsd_c,
                  std::int64_t cycles) {
  switch (kind) {
    case Kind::Constant:
      return 1.0;
    case Kind::SqrtInverse:
      return 1.0 / std::sqrt(t + 1.0);
    case Kind::LinearDecay:
      return 1.0 - t / T;
    case Kind::CosineDecay:
      return 0.5 * (1.0 + std::cos(kPi * t / T));
    case Kind::WSD: {
      const double stable_end = wsd_c * T;
      if (t < stable_end) return 1.0;
      return (T - t) / (T - stable_end);
    }
    case Kind::Cyclic: {
      const double period = T / static_cast<double>(cycles);
      double u = std::fmod(t, period) / period;
      // Symmetric triangle: 0 at cycle boundaries, 1 at mid-cycle.
      return u < 0.5 ? 2.0 * u : 2.0 * (1.0 - u);
    }
  }
  return 0.0;
}

}  // namespace

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Constant: return "constant";
    case Kind::SqrtInverse: return "sqrt_inverse";
    case Kind::LinearDecay: return "linear_decay";
    case Kind::CosineDecay: return "cosine_decay";
    case Kind::WSD: return "wsd";
    case Kind::Cyclic: return "cyclic";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& name) {
  if (name == "constant") return Kind::Constant;
  if (name == "sqrt_inverse") return Kind::SqrtInverse;
  if (name == "linear_decay") return Kind::LinearDecay;
  if (name == "cosine_decay") return Kind::CosineDecay;
  if (name == "wsd") return Kind::WSD;
  if (name == "cyclic") return Kind::Cyclic;
  throw validation_error(
      "unknown schedule kind '" + name +
      "' (expected one of: constant, sqrt_inverse, linear_decay, "
      "cosine_decay, wsd, cyclic)");
}

ScheduleSpec make_spec(const ScheduleFamily& family, double eta_peak,
                       std::int64_t T) {
  ScheduleSpec spec;
  spec.kind = family.kind;
  spec.eta_peak = eta_peak;
  spec.T = T;
  spec.wsd_c = family.wsd_c;
  spec.warmup_frac = family.warmup_frac;
  spec.cycles = family.cycles;
  return spec;
}

void validate(const ScheduleSpec& spec) {
  if (!std::isfinite(spec.eta_peak) || spec.eta_peak <= 0.0) {
    throw validation_error("ScheduleSpec.eta_peak must be finite and > 0");
  }
  if (spec.T < 1) {
    throw validation_error("ScheduleSpec.T must be >= 1");
  }
  if (spec.kind == Kind::WSD &&
      (!std::isfinite(spec.wsd_c) || spec.wsd_c <= 0.0 || spec.wsd_c >= 1.0)) {
    throw validation_error("ScheduleSpec.c must lie strictly in (0, 1)");
  }
  if (!std::isfinite(spec.warmup_frac) || spec.warmup_frac < 0.0 ||
      spec.warmup_frac >= 1.0) {
    throw validation_error("ScheduleSpec.warmup_frac must lie in [0, 1)");
  }
  if (spec.warmup_frac > 0.0 && warmup_steps(spec) >= spec.T) {
    throw validation_error(
        "ScheduleSpec.warmup_frac leaves no post-warmup steps at this T");
  }
  // Shapes that decay to zero need at least two steps, otherwise the whole
  // sequence would be zero and violate the sequence invariant.
  if (spec.T == 1 &&
      (spec.kind == Kind::LinearDecay || spec.kind == Kind::CosineDecay ||
       spec.kind == Kind::WSD)) {
    throw validation_error(
        "ScheduleSpec.T too short: every step of this kind would be zero");
  }
  if (spec.kind == Kind::Cyclic) {
    if (spec.cycles < 1) {
      throw validation_error("ScheduleSpec.cycles must be >= 1");
    }
    const std::int64_t usable = spec.T - warmup_steps(spec);
    if (spec.cycles * 2 > usable) {
      throw validation_error(
          "ScheduleSpec.cycles too large: each cycle needs at least 2 steps");
    }
  }
}

std::int64_t warmup_steps(const ScheduleSpec& spec) {
  if (spec.warmup_frac <= 0.0) return 0;
  return static_cast<std::int64_t>(
      std::ceil(spec.warmup_frac * static_cast<double>(spec.T)));
}

LearningRateSequence eval_discrete(const ScheduleSpec& spec) {
  validate(spec);
  const std::int64_t W = warmup_steps(spec);
  const double horizon = static_cast<double>(spec.T - W);
  LearningRateSequence out(static_cast<std::size_t>(spec.T));
  for (std::int64_t t = 1; t <= spec.T; ++t) {
    double s;
    if (t <= W) {
      s = static_cast<double>(t) / static_cast<double>(W);
    } else {
      s = base_shape(spec.kind, static_cast<double>(t - W), horizon,
                     spec.wsd_c, spec.cycles);
    }
    out[static_cast<std::size_t>(t - 1)] = spec.eta_peak * s;
  }
  return out;
}

double eval_continuous(const ScheduleSpec& spec, double t) {
  validate(spec);
  if (!std::isfinite(t) || t < 0.0 || t > static_cast<double>(spec.T)) {
    throw validation_error("schedule evaluated outside [0, T]");
  }
  const std::int64_t W = warmup_steps(spec);
  double s;
  if (t <= static_cast<double>(W) && W > 0) {
    s = t / static_cast<double>(W);
  } else {
    s = base_shape(spec.kind, t - static_cast<double>(W),
                   static_cast<double>(spec.T - W), spec.wsd_c, spec.cycles);
  }
  return spec.eta_peak * s;
}

std::string spec_to_json(const ScheduleSpec& spec) {
  validate(spec);
  json j;
  j["kind"] = to_string(spec.kind);
  j["eta_peak"] = spec.eta_peak;
  j["T"] = spec.T;
  if (spec.kind == Kind::WSD) j["c"] = spec.wsd_c;
  if (spec.warmup_frac > 0.0) j["warmup_frac"] = spec.warmup_frac;
  if (spec.kind == Kind::Cyclic) j["cycles"] = spec.cycles;
  return j.dump();
}

ScheduleSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("schedule JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw validation_error("schedule JSON must be an object");
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "kind" && key != "eta_peak" && key != "T" && key != "c" &&
        key != "warmup_frac" && key != "cycles") {
      throw validation_error("schedule JSON: unknown key '" + key + "'");
    }
  }
  for (const char* key : {"kind", "eta_peak", "T"}) {
    if (!j.contains(key)) {
      throw validation_error(std::string("schedule JSON: missing key '") +
                             key + "'");
    }
  }
  ScheduleSpec spec;
  try {
    spec.kind = kind_from_string(j.at("kind").get<std::string>());
    spec.eta_peak = j.at("eta_peak").get<double>();
    spec.T = j.at("T").get<std::int64_t>();
    if (j.contains("c")) spec.wsd_c = j.at("c").get<double>();
    if (j.contains("warmup_frac"))
      spec.warmup_frac = j.at("warmup_frac").get<double>();
    if (j.contains("cycles")) spec.cycles = j.at("cycles").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw validation_error(std::string("schedule JSON: ") + e.what());
  }
  validate(spec);
  return spec;
}

}  // namespace schedlaw
