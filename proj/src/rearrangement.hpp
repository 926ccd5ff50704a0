#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "function_model.hpp"
#include "volume_engine.hpp"

namespace pshsym {

/// Nondecreasing right-continuous function on [0, |Omega|], stored by knots
/// (log s_i, v_i) with s_i ascending; the last knot sits at s = |Omega|.
/// Below the first knot the first segment is extended and clamped at
/// lower_bound, the essential infimum (or -inf).
class MonotoneTable {
 public:
  enum class Mode { Step, Linear, LogLinear };
  struct Knot {
    double log_s;
    double v;
    double rel_err = 0.0;  // relative error of the measure at this knot
  };

  MonotoneTable() = default;
  MonotoneTable(std::vector<Knot> knots, double lower_bound, Mode mode = Mode::LogLinear);

  /// u_*(s) = inf{t : mu(t) > s} from a decreasing-level volume series.
  static MonotoneTable from_profile(const VolumeProfile& profile, double log_total, double sup,
                                    Mode mode = Mode::LogLinear);

  double operator()(double s) const { return at_log(std::log(s)); }
  double at_log(double log_s) const;
  /// log |{u_* < t}|.
  double log_measure(double t) const;
  double measure(double t) const { return std::exp(log_measure(t)); }

  /// int_0^{s_end} u_*(s) ds  (log-linear mode).
  double integral(double s_end) const;
  /// log int_{s_from}^{|Omega|} e^{-2 c u_*(s)} ds  (log-linear mode).
  double log_exp_integral(double c, double log_s_from) const;

  const std::vector<Knot>& knots() const { return knots_; }
  double lower_bound() const { return lower_bound_; }
  double log_total() const { return knots_.back().log_s; }
  double total() const { return std::exp(log_total()); }
  double sup() const { return knots_.back().v; }
  Mode mode() const { return mode_; }
  /// Slope dv / dlog s of the deepest segment.
  double first_slope() const;

  /// Breakpoints (s_i, v_i) starting with (0, lower_bound).
  std::vector<std::pair<double, double>> breakpoints() const;

 private:
  std::vector<Knot> knots_;
  double lower_bound_ = kNegInf;
  Mode mode_ = Mode::LogLinear;
};

const char* to_string(MonotoneTable::Mode m);

/// Default level grid below `top`: uniform steps down to top - grid_near_depth,
/// then grid_deep_points levels log-spaced in depth down to top + t_min.
std::vector<double> default_t_grid(const RunConfig& config, double top = 0.0);

struct Rearrangement {
  MonotoneTable table;
  std::vector<double> t_grid;  // after refinement, decreasing
  VolumeProfile volumes;
  int refinement_probes = 0;
  int refined_levels = 0;
};

/// Computes mu on the grid and inverts it. Gaps wider than grid_max_jump are
/// probed at their midpoint and refined while the inversion misses.
Rearrangement increasing_rearrangement(const FunctionSpec& spec, std::span<const double> t_grid,
                                       const RunConfig& config);

struct ConvexityReport {
  bool ok = true;
  double worst_excess = 0.0;  // largest f2 - chord over all knot triples
  double worst_tolerance = 0.0;
  std::array<double, 3> witness_t{};
  std::array<double, 3> witness_f{};
};

struct SymmetrizationResult {
  FunctionSpec source;  // normalized input
  Rearrangement rearrangement;
  FunctionSpec u_hat;  // radial spec with the symmetrized profile as a table
  ConvexityReport convexity;

  const MonotoneTable& u_star() const { return rearrangement.table; }
  const RadialProfile& profile() const { return std::get<RadialProfile>(u_hat.body()); }
};

/// Symmetrizes spec.normalized(). Throws CONVEXITY_VIOLATION when the profile
/// of u-hat is not convex and nondecreasing within tolerance.
SymmetrizationResult schwarz_symmetrize(const FunctionSpec& spec, std::span<const double> t_grid,
                                        const RunConfig& config);
SymmetrizationResult schwarz_symmetrize(const FunctionSpec& spec, const RunConfig& config);

ConvexityReport check_profile_convexity(std::span<const Knot> knots, std::span<const double> knot_uncertainty,
                                        double tol);

// ---------------------------------------------------------------------------
// checks

struct EquimeasurabilityProbe {
  double t;
  double log_mu_u;
  double log_mu_u_star;
  double log_mu_u_hat;
  double rel_discrepancy;
};

struct EquimeasurabilityReport {
  std::vector<EquimeasurabilityProbe> probes;
  double max_rel_discrepancy = 0.0;
};

/// Probe levels at u_*(q |Omega|) for q log-spaced from 0.9 down to 0.9e-6.
std::vector<double> default_probe_levels(const SymmetrizationResult& result, int count = 20);

EquimeasurabilityReport equimeasurability_check(const SymmetrizationResult& result, std::span<const double> t_probe,
                                                const RunConfig& config);

struct LayerCakeCut {
  double t_cut;
  double lhs;  // int_{u >= t_cut} e^{-2 c u}
  double rhs;  // int_{mu(t_cut)}^{|Omega|} e^{-2 c u_*}
  double rel_gap;
};

struct LayerCakeReport {
  double c = 0.0;
  std::vector<LayerCakeCut> cuts;
  bool divergent = false;  // both sides beyond the sentinel at the deepest cut
  bool finite = false;     // both sides settled as the cut deepens
  double rel_gap = 0.0;    // at the deepest cut
  double sentinel = 1e6;
};

/// Layer-cake identity for F(u) = e^{-2 c u}, truncated at deepening levels.
LayerCakeReport layer_cake_check(const SymmetrizationResult& result, double c, const RunConfig& config,
                                 std::vector<double> cuts = {-10, -20, -40, -80});

struct SublevelIntegralReport {
  std::vector<double> center;
  double radius = 0.0;
  double ball_volume = 0.0;
  double lhs = 0.0;          // int_E u
  double lhs_error = 0.0;    // quadrature error or 3 sigma
  double rhs = 0.0;          // int_0^{|E|} u_*
  double u_hat_integral = 0.0;  // int_E u-hat for centered E
  double gap = 0.0;          // lhs - rhs
  bool holds = false;
  bool centered = false;
  std::string method;
};

SublevelIntegralReport sublevel_integral_check(const SymmetrizationResult& result, std::span<const double> center,
                                               double radius, const RunConfig& config);

struct PolyaSzegoReport {
  double p = 2.0;
  double rho = 0.0;
  double upper_radius = 0.0;
  double level = 0.0;        // lower truncation level f-hat(log rho)
  double upper_level = 0.0;  // upper truncation level f-hat(log upper_radius)
  double energy_u = 0.0;
  double energy_u_hat = 0.0;
  double margin = 0.0;  // energy_u - energy_u_hat
  double richardson_disagreement = 0.0;
  bool holds = false;
};

/// Compares the p-energies of min(max(u, c), d) and of the same truncation of
/// u-hat, c = f-hat(log rho), d = f-hat(log(upper_fraction R0)). The upper cut
/// keeps sub-level sets off the boundary sphere, where u need not vanish.
PolyaSzegoReport polya_szego_check(const SymmetrizationResult& result, double rho, double p,
                                   const RunConfig& config, double upper_fraction = 0.5);

nlohmann::json to_json(const MonotoneTable& table);
nlohmann::json to_json(const SymmetrizationResult& result);

}  // namespace pshsym
