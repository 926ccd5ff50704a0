#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"
#include "config.hpp"
#include "function_model.hpp"
#include "rearrangement.hpp"
#include "slope.hpp"

namespace pshsym {

/// nu_u(0). Radial: slope of f; toric: slope of g(t, ..., t); S1: slope of the
/// maximum of u over sampled points of the sphere |z| = e^t.
SlopeEstimate lelong_origin(const FunctionSpec& spec, const RunConfig& config);

/// Slope in log r of the maximum of u over sampled points of the sphere |z - x| = r.
SlopeEstimate lelong_at_point(const FunctionSpec& spec, std::span<const double> x, const RunConfig& config);

/// nu_u(0, a) for a with positive entries. Throws SYMMETRY_REQUIRED for S1 specs.
SlopeEstimate refined_lelong(const FunctionSpec& spec, std::span<const double> a, const RunConfig& config);

/// iota = 2 / k from the fit log mu(t) = k t + c on the deep window. Levels
/// with no usable volume shrink the window (recorded in the estimate).
SlopeEstimate integrability_index_volume(const FunctionSpec& spec, const RunConfig& config);

/// Lelong number of u-hat: slope of its profile on the deepest third of the table.
SlopeEstimate lelong_symmetrized(const SymmetrizationResult& result, const RunConfig& config);

struct SimplexMaximum {
  double value = 0.0;
  std::vector<double> a;
  SlopeEstimate slope;  // nu(0, a) at the maximizer
  /// The maximizer sits closer to a face than the grid step: the supremum is a
  /// limit toward the boundary of the open simplex.
  bool boundary = false;
  int evaluations = 0;
  int grid = 0;
};

/// sup of nu(0, a) over the open simplex: grid search, then pattern search
/// along e_i - e_j down to simplex_tol.
SimplexMaximum integrability_index_kiselman(const FunctionSpec& spec, const RunConfig& config);

/// sup of nu(0, a)^n / prod a over the simplex. Throws SINGLE_POLE_REQUIRED.
SimplexMaximum rashkovskii_lower_bound(const FunctionSpec& spec, const RunConfig& config);

struct ResidueMass {
  double value = 0.0;
  SlopeEstimate slope;
};

/// [nu]^n with nu the asymptotic slope of the profile.
ResidueMass residue_mass_radial(const RadialProfile& profile, int n, const RunConfig& config);

/// Smooth convex profile obtained from a table by replacing each kink with a
/// Gaussian-smoothed ramp of width `width` (growing with depth, so that
/// finite differences stay above rounding noise far out).
RadialProfile mollified(const RadialProfile& table, double width = 0.05);

struct MaConsistencyReport {
  int n = 0;
  double radius = 0.0;
  int resolution = 0;
  double fd_step = 0.0;
  double atom = 0.0;                  // nu^n
  double absolutely_continuous = 0.0; // quadrature of the determinant formula on (0, R]
  double lhs = 0.0;
  double rhs = 0.0;  // [R y'(R)]^n
  double rel_gap = 0.0;
};

/// Compares the Monge-Ampere mass of the ball B_R for the radial function with
/// profile f against [R y'(R)]^n, y(r) = f(log r). The profile must be smooth
/// near log R; throws NUMERICAL_GRADIENT_UNSTABLE otherwise. Resolution k uses
/// finite-difference step 2e-3 / 2^k.
MaConsistencyReport radial_ma_consistency(const RadialProfile& profile, int n, double radius,
                                          const RunConfig& config, int resolution = 0);

/// Interior points for the point Lelong numbers: half of them on {z_1 = 0}.
std::vector<std::vector<double>> lelong_sample_points(const FunctionSpec& spec, const RunConfig& config);

struct InvariantReport {
  std::string name;
  int dimension = 0;
  SlopeEstimate nu;
  SlopeEstimate iota_volume;
  std::optional<SimplexMaximum> iota_kiselman;
  std::string kiselman_note;
  SlopeEstimate nu_hat;
  double tau_hat = 0.0;
  TauKind tau_kind = TauKind::Unknown;
  std::optional<double> tau;
  std::optional<SimplexMaximum> rashkovskii_lb;
  std::string rashkovskii_note;
  std::map<std::string, bool> bounds_ok;

  bool any_unstable() const;
};

InvariantReport compute_invariants(const SymmetrizationResult& result, const RunConfig& config,
                                   TauKind tau_kind = TauKind::Unknown, double tau = 0.0);

enum class CheckStatus { Pass, Fail, Inapplicable };
const char* to_string(CheckStatus s);

struct TheoremCheck {
  std::string id;
  std::string statement;
  std::vector<std::pair<std::string, double>> values;
  double margin = 0.0;  // >= -tolerance passes
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Inapplicable;
  std::string note;
};

struct PointLelong {
  std::vector<double> x;
  SlopeEstimate nu;
};

struct TheoremReport {
  std::string name;
  std::vector<TheoremCheck> checks;
  std::vector<PointLelong> points;

  bool all_pass() const;
};

/// Runs the fixed check registry. FAIL is reported, never thrown.
TheoremReport verify_theorems(const InvariantReport& inv, const SymmetrizationResult& result,
                              const RunConfig& config);
TheoremReport verify_theorems(const FunctionSpec& spec, const RunConfig& config, TauKind tau_kind = TauKind::Unknown,
                              double tau = 0.0);

nlohmann::json to_json(const SimplexMaximum& m);
nlohmann::json to_json(const MaConsistencyReport& r);
nlohmann::json to_json(const InvariantReport& r);
nlohmann::json to_json(const TheoremReport& r);

}  // namespace pshsym
