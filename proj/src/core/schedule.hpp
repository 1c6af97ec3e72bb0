#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace schedlaw {

enum class Kind {
  Constant,
  SqrtInverse,
  LinearDecay,
  CosineDecay,
  WSD,
  Cyclic,
};

// Canonical names used in JSON and on the CLI:
// constant, sqrt_inverse, linear_decay, cosine_decay, wsd, cyclic.
std::string to_string(Kind k);
Kind kind_from_string(const std::string& name);

// eta_t for t = 1..T lives at values[t-1].
using LearningRateSequence = std::vector<double>;

struct ScheduleSpec {
  Kind kind = Kind::Constant;
  double eta_peak = 1.0;
  std::int64_t T = 1;
  double wsd_c = 0.8;        // WSD stable fraction, in (0,1)
  double warmup_frac = 0.0;  // linear warmup over ceil(warmup_frac*T) steps
  std::int64_t cycles = 1;   // Cyclic only

  bool operator==(const ScheduleSpec&) const = default;
};

// Family = spec minus (eta_peak, T); what the qualifier and the optimizers
// sweep over.
struct ScheduleFamily {
  Kind kind = Kind::Constant;
  double wsd_c = 0.8;
  double warmup_frac = 0.0;
  std::int64_t cycles = 1;
};

ScheduleSpec make_spec(const ScheduleFamily& family, double eta_peak,
                       std::int64_t T);

// Throws validation_error naming the offending field.
void validate(const ScheduleSpec& spec);

// Number of warmup steps, ceil(warmup_frac*T). Zero when warmup_frac == 0.
std::int64_t warmup_steps(const ScheduleSpec& spec);

LearningRateSequence eval_discrete(const ScheduleSpec& spec);

// Piecewise-smooth interpolant on [0, T]; agrees with eval_discrete at
// integer t for every kind.
double eval_continuous(const ScheduleSpec& spec, double t);

std::string spec_to_json(const ScheduleSpec& spec);
ScheduleSpec spec_from_json(const std::string& text);

}  // namespace schedlaw
