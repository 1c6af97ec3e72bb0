#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace schedlaw {

enum class HorizonUnit { Steps, Tokens };

std::string to_string(HorizonUnit unit);
HorizonUnit horizon_unit_from_string(const std::string& name);

struct RunRecord {
  double eta_ref = 0.0;
  double horizon = 0.0;  // steps or tokens, per `unit`
  HorizonUnit unit = HorizonUnit::Steps;
  double final_loss = 0.0;
  double batch_size = 0.0;  // 0 when absent
  double model_size = 0.0;  // 0 when absent
};

void validate(const RunRecord& record);

struct LineFit {
  double L_inf = 0.0;  // intercept, clamped at 0 (losses are non-negative)
  double Q = 0.0;      // slope against 1/sqrt(horizon)
  double r2 = 0.0;
  std::int64_t points_used = 0;
  std::int64_t points_excluded = 0;  // below the horizon cutoff
};

// Smallest integer horizon with 1/sqrt(T) < 0.02; the law is not predictive
// before roughly this point.
inline constexpr std::int64_t kDefaultTMinCutoff = 2501;

// OLS of final_loss against 1/sqrt(horizon) over records at or above the
// cutoff. All records must share one horizon unit.
LineFit fit_sqrtT_line(const std::vector<RunRecord>& records,
                       std::int64_t T_min_cutoff = kDefaultTMinCutoff);

// Horizon-free loss-gap coefficient q1^2/eta + eta q2^2, minimized at
// eta = q1/q2 with value 2 q1 q2.
double q_curve(double q1, double q2, double eta_ref);

struct QCurve {
  double q1 = 0.0;
  double q2 = 0.0;
};

// Fits (q1, q2) to (eta, Q) samples: nonnegative linear init on
// Q*eta = q1^2 + q2^2 eta^2, then Gauss-Newton on log residuals. Needs at
// least 3 distinct etas.
QCurve fit_q_curve(const std::vector<double>& etas,
                   const std::vector<double>& Qs);

struct Selection {
  double eta_ref_star = 0.0;
  double Q_star = 0.0;
  bool interpolated = false;
  QCurve curve;  // meaningful only when interpolated
};

// Grid mode returns the argmin of fitted Q (ties go to the smaller eta_ref);
// interpolation mode fits a QCurve and returns its analytic minimum.
Selection select_eta_ref(const std::map<double, LineFit>& fits,
                         bool interpolate);

struct ScalingFit {
  std::map<double, LineFit> per_eta_ref;
  double eta_ref_star = 0.0;
  double Q_star = 0.0;
  double L_inf_star = 0.0;
  std::int64_t T_min_cutoff = kDefaultTMinCutoff;
  HorizonUnit unit = HorizonUnit::Steps;
  bool interpolated = false;
  QCurve curve;
  double horizon_min = 0.0;  // range of the records that survived the cutoff
  double horizon_max = 0.0;
};

// Full pipeline: group records by eta_ref, fit a line per group, select the
// reference rate. L_inf_star comes from the selected group (nearest in log
// scale under interpolation).
ScalingFit scaling_fit(const std::vector<RunRecord>& records,
                       std::int64_t T_min_cutoff = kDefaultTMinCutoff,
                       bool interpolate = false);

struct TransferResult {
  double eta_peak = 0.0;
  bool extrapolation_warning = false;  // set when transferring downward
};

// eta_peak_small / sqrt(T_target / T_small).
TransferResult transfer_lr(double eta_peak_small, double T_small,
                           double T_target);

double flops_to_tokens(double flops, double model_size);
double tokens_to_steps(double tokens, double batch_size);

// L_inf_star + Q_star / sqrt(T_target).
double predict_loss(const ScalingFit& fit, double T_target);

std::string scaling_fit_to_json(const ScalingFit& fit);

}  // namespace schedlaw
