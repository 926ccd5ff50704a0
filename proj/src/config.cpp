#include "config.hpp"

#include "error.hpp"

namespace pshsym {

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
  };
  if (!(t_min < 0)) throw Error(ErrorCode::InvalidArgument, "t_min must be negative");
  positive(slope_points, "slope_points");
  positive(stability_floor, "stability_floor");
  positive(grid_near_step, "grid_near_step");
  positive(grid_near_depth, "grid_near_depth");
  positive(grid_deep_points, "grid_deep_points");
  positive(grid_max_jump, "grid_max_jump");
  positive(grid_probe_tol, "grid_probe_tol");
  positive(quad_rel_tol, "quad_rel_tol");
  positive(static_cast<double>(mc_samples), "mc_samples");
  positive(mc_shells, "mc_shells");
  positive(-mc_inner_log_radius, "-mc_inner_log_radius");
  positive(sphere_samples, "sphere_samples");
  positive(point_sphere_samples, "point_sphere_samples");
  positive(point_radii, "point_radii");
  positive(lelong_points, "lelong_points");
  positive(simplex_grid, "simplex_grid");
  positive(simplex_tol, "simplex_tol");
  positive(pass_tol, "pass_tol");
  positive(convexity_tol, "convexity_tol");
  positive(interp_tol, "interp_tol");
  if (slope_points < 8) throw Error(ErrorCode::InvalidArgument, "slope_points must be at least 8");
  if (grid_near_depth > -t_min) throw Error(ErrorCode::InvalidArgument, "grid_near_depth exceeds |t_min|");
  for (const auto& f : formats)
    if (f != "json" && f != "csv" && f != "svg")
      throw Error(ErrorCode::InvalidArgument, "unknown output format '" + f + "'");
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json{
      {"seed", c.seed},
      {"t_min", c.t_min},
      {"slope_points", c.slope_points},
      {"stability_floor", c.stability_floor},
      {"grid_near_step", c.grid_near_step},
      {"grid_near_depth", c.grid_near_depth},
      {"grid_deep_points", c.grid_deep_points},
      {"grid_max_jump", c.grid_max_jump},
      {"grid_probe_tol", c.grid_probe_tol},
      {"quad_rel_tol", c.quad_rel_tol},
      {"mc_samples", c.mc_samples},
      {"mc_shells", c.mc_shells},
      {"mc_inner_log_radius", c.mc_inner_log_radius},
      {"sphere_samples", c.sphere_samples},
      {"point_sphere_samples", c.point_sphere_samples},
      {"point_radii", c.point_radii},
      {"lelong_points", c.lelong_points},
      {"simplex_grid", c.simplex_grid},
      {"simplex_tol", c.simplex_tol},
      {"pass_tol", c.pass_tol},
      {"convexity_tol", c.convexity_tol},
      {"interp_tol", c.interp_tol},
      {"formats", c.formats},
  };
}

void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "t_min") c.t_min = value.get<double>();
      else if (key == "slope_points") c.slope_points = value.get<int>();
      else if (key == "stability_floor") c.stability_floor = value.get<double>();
      else if (key == "grid_near_step") c.grid_near_step = value.get<double>();
      else if (key == "grid_near_depth") c.grid_near_depth = value.get<double>();
      else if (key == "grid_deep_points") c.grid_deep_points = value.get<int>();
      else if (key == "grid_max_jump") c.grid_max_jump = value.get<double>();
      else if (key == "grid_probe_tol") c.grid_probe_tol = value.get<double>();
      else if (key == "quad_rel_tol") c.quad_rel_tol = value.get<double>();
      else if (key == "mc_samples") c.mc_samples = value.get<std::int64_t>();
      else if (key == "mc_shells") c.mc_shells = value.get<int>();
      else if (key == "mc_inner_log_radius") c.mc_inner_log_radius = value.get<double>();
      else if (key == "sphere_samples") c.sphere_samples = value.get<int>();
      else if (key == "point_sphere_samples") c.point_sphere_samples = value.get<int>();
      else if (key == "point_radii") c.point_radii = value.get<int>();
      else if (key == "lelong_points") c.lelong_points = value.get<int>();
      else if (key == "simplex_grid") c.simplex_grid = value.get<int>();
      else if (key == "simplex_tol") c.simplex_tol = value.get<double>();
      else if (key == "pass_tol") c.pass_tol = value.get<double>();
      else if (key == "convexity_tol") c.convexity_tol = value.get<double>();
      else if (key == "interp_tol") c.interp_tol = value.get<double>();
      else if (key == "workers") c.workers = value.get<int>();
      else if (key == "output_dir") c.output_dir = value.get<std::string>();
      else if (key == "formats") c.formats = value.get<std::vector<std::string>>();
      else throw Error(ErrorCode::SchemaError, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("config: ") + e.what());
  }
  c.validate();
}

}  // namespace pshsym
