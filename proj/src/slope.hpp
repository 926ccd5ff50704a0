#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pshsym {

enum class SlopeMethod { ProfileDerivative, MaxOnSpheres, MeanOnTori, VolumeLogRatio };
const char* to_string(SlopeMethod m);

struct SlopeEstimate {
  double slope = 0.0;
  double std_error = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int points_used = 0;
  SlopeMethod method = SlopeMethod::ProfileDerivative;
  /// Slope refitted on the deeper half of the window.
  double refit_slope = 0.0;
  bool unstable = false;
  /// Window was shortened because part of it had no usable data.
  bool window_shrunk = false;
  std::string note;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
};

/// Weighted least squares y = slope * t + intercept.
LinearFit weighted_line_fit(std::span<const double> t, std::span<const double> y, std::span<const double> w);

/// `points` levels evenly spaced on [t_lo, t_lo / 3], deepest first.
std::vector<double> slope_window(double t_lo, int points);

/// Fits the asymptotic slope with weights |t| and refits on the deeper half;
/// the estimate is UNSTABLE when the two differ by more than
/// max(3 stderr, stability_floor). Small negative slopes are clamped to 0
/// when `nonnegative`.
SlopeEstimate fit_asymptotic_slope(std::span<const double> t, std::span<const double> y, SlopeMethod method,
                                   double stability_floor, bool nonnegative = true);

nlohmann::json to_json(const SlopeEstimate& s);

}  // namespace pshsym
