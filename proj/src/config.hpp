#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace pshsym {

/// Every numeric knob of a run. Echoed verbatim into each report so outputs
/// can be regenerated from the report alone.
struct RunConfig {
  std::uint64_t seed = 20140201;

  // asymptotic window: slopes are fitted on [t_min, t_min / 3]
  double t_min = -1.0e4;
  int slope_points = 64;
  double stability_floor = 0.01;  // minimum slope change that counts as window instability

  // symmetrization grid: uniform near the supremum, log-spaced in |t| below
  double grid_near_step = 0.01;
  double grid_near_depth = 8.0;
  int grid_deep_points = 64;
  double grid_max_jump = 0.25;   // level gap above which a refinement probe is run
  double grid_probe_tol = 1e-3;  // allowed inversion error at a probe (abs + rel)

  // volume engine
  double quad_rel_tol = 1e-6;
  std::int64_t mc_samples = 1000000;
  int mc_shells = 32;
  double mc_inner_log_radius = -12.0;  // innermost shell radius is R0 * e^{this}

  // sphere sampling for max-on-spheres estimators
  int sphere_samples = 4096;
  int point_sphere_samples = 1024;
  int point_radii = 32;
  int lelong_points = 16;

  // simplex optimizer
  int simplex_grid = 32;
  double simplex_tol = 1e-4;

  // checks
  double pass_tol = 0.05;
  double convexity_tol = 1e-6;
  double interp_tol = 5e-3;

  int workers = 0;  // 0 = hardware concurrency

  std::string output_dir = "out";
  std::vector<std::string> formats = {"json", "csv", "svg"};

  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Overlays keys present in j onto c (unknown keys are a schema error).
void apply_json(RunConfig& c, const nlohmann::json& j);

}  // namespace pshsym
