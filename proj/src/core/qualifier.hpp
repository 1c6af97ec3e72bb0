#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/schedule.hpp"

namespace schedlaw {

enum class Verdict { Qualified, NotQualified };

std::string to_string(Verdict v);

struct QualifyReport {
  ScheduleFamily family;
  std::vector<std::int64_t> T_grid;
  std::vector<double> values;  // exam value per horizon
  double alpha = 0.0;          // decay exponent, -d ln(value)/d ln(T)
  double log_growth_slope = 0.0;  // slope of value*sqrt(T) against ln(T)
  double log_growth_threshold = 0.0;
  bool log_growth_detected = false;
  bool no_closed_form_reference = false;  // cyclic or warmed-up families
  bool singular = false;  // an exam value failed to evaluate
  double delta = 0.02;
  Verdict verdict = Verdict::NotQualified;
};

// Horizons 1e3 .. 1e7 in decade steps.
std::vector<std::int64_t> default_exam_grid();

// Scores the family with eta_t(T) = s_t(T)/sqrt(T) across the horizon grid.
// Qualified when the exam value decays like T^(-1/2) (alpha >= 1/2 - delta)
// with no residual log growth in value*sqrt(T).
QualifyReport qualify(const ScheduleFamily& family,
                      const std::vector<std::int64_t>& T_grid =
                          default_exam_grid(),
                      double delta = 0.02, double D = 1.0, double G = 1.0);

std::string qualify_report_to_json(const QualifyReport& report);

}  // namespace schedlaw
