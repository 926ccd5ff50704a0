#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "function_model.hpp"

namespace pshsym {

enum class VolumeMethod { RadialExact, ToricQuadrature, MonteCarlo };
const char* to_string(VolumeMethod m);

struct VolumeEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  /// abs_error / value, kept separately because value may underflow.
  double rel_error = 0.0;
  VolumeMethod method = VolumeMethod::RadialExact;
  std::uint64_t nodes = 0;
  /// log(value); stays accurate where value underflows.
  double log_value = kNegInf;
  /// t below the essential infimum: the sub-level set is empty.
  bool empty = false;
};

/// a_N = pi^{N/2} / Gamma(N/2 + 1), volume of the unit ball in R^N.
double ball_coefficient(int N);
double log_ball_coefficient(int N);

/// Volume of the domain ball of the spec.
double domain_volume(const FunctionSpec& spec);

/// |{u < t}| dispatched on the symmetry class. `force` selects a specific
/// method (e.g. Monte Carlo on a toric spec for cross-checking).
VolumeEstimate sublevel_volume(const FunctionSpec& spec, double t, const RunConfig& config,
                               std::optional<VolumeMethod> force = std::nullopt);

struct ProfilePoint {
  double t = 0.0;
  VolumeEstimate estimate;
  bool failed = false;
  std::string error;
};

struct VolumeProfile {
  std::vector<ProfilePoint> points;
  /// Largest downward correction applied to keep volumes nonincreasing in t.
  double max_adjustment = 0.0;
  int adjusted_points = 0;
};

/// One estimate per grid level; t_grid must be strictly decreasing.
VolumeProfile volume_profile(const FunctionSpec& spec, std::span<const double> t_grid, const RunConfig& config,
                             std::optional<VolumeMethod> force = std::nullopt);

/// Cummin pass over the series (in grid order), recording the corrections.
void enforce_monotone(VolumeProfile& profile);

std::string volume_profile_csv(const VolumeProfile& profile);

// ---------------------------------------------------------------------------
// Integration over toric level regions, shared with the rearrangement checks.

/// log of a nonnegative integrand psi(x, g(x)) in log coordinates x_k = log|z_k|.
using LogIntegrand = std::function<double(std::span<const double> x, double g)>;

struct LevelIntegral {
  double log_value = kNegInf;
  double rel_error = 0.0;
  std::uint64_t nodes = 0;
};

/// log of  int_{ lo <= u < hi, |z| < radius } psi(u) dlambda  for a toric (or
/// radial) spec, computed in log coordinates with weight (2 pi)^n e^{2 sum x}.
/// A null psi integrates 1 (the inner coordinate is then done in closed form).
/// Radial specs reduce to one dimension: psi is then evaluated on the diagonal
/// and must be invariant under unitary rotations.
LevelIntegral toric_level_integral(const FunctionSpec& spec, double lo, double hi, double radius,
                                   const LogIntegrand& log_psi, double rel_tol);

/// Monte Carlo estimate of |{u < t}| for each level, from one stratified sample.
std::vector<VolumeEstimate> monte_carlo_volumes(const FunctionSpec& spec, std::span<const double> levels,
                                                const RunConfig& config);

}  // namespace pshsym
