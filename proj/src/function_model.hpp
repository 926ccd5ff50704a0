#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "expression.hpp"
#include "extended_value.hpp"
#include "log_real.hpp"

namespace pshsym {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Symmetry { Radial, Toric, S1Invariant };
enum class PoleStructure { SinglePoleAtOrigin, NontrivialPolarSet, NoPole };

const char* to_string(Symmetry s);
const char* to_string(PoleStructure p);

/// Capability order RADIAL < TORIC < S1_INVARIANT: a function of class `have`
/// may be used wherever `required` is asked for.
constexpr bool satisfies(Symmetry have, Symmetry required) {
  return static_cast<int>(have) <= static_cast<int>(required);
}

struct Knot {
  double t;
  double f;
};

/// Convex nondecreasing profile f(t) = u(z), t = log|z|.
class RadialProfile {
 public:
  enum class Kind { ClosedForm, Table };

  static RadialProfile closed_form(std::function<double(double)> f, double t_min);
  /// Piecewise linear through the knots, extrapolated linearly with the end
  /// slopes, and clamped below at `floor`.
  static RadialProfile table(std::vector<Knot> knots, double floor = kNegInf);

  double operator()(double t) const;

  Kind kind() const { return kind_; }
  double t_min() const { return t_min_; }
  double floor() const { return floor_; }
  const std::vector<Knot>& knots() const { return knots_; }
  /// Slope of the deepest table segment (0 for closed forms).
  double tail_slope() const;

 private:
  Kind kind_ = Kind::ClosedForm;
  std::function<double(double)> f_;
  std::vector<Knot> knots_;
  double t_min_ = -1e4;
  double floor_ = kNegInf;
};

/// g(x_1..x_n) = u(z) with x_k = log|z_k|, for functions invariant under
/// independent rotation of each coordinate.
class ToricProfile {
 public:
  ToricProfile(int arity, std::function<double(std::span<const double>)> g) : arity_(arity), g_(std::move(g)) {}
  int arity() const { return arity_; }
  double operator()(std::span<const double> x) const { return g_(x); }

 private:
  int arity_;
  std::function<double(std::span<const double>)> g_;
};

/// Direct evaluation on R^{2n} (interleaved re/im). `deep` takes log-domain
/// coordinates and is optional.
struct PointEvaluator {
  std::function<double(std::span<const double>)> fast;
  std::function<LogReal(std::span<const LogReal>)> deep;
};

class FunctionSpec {
 public:
  using Body = std::variant<RadialProfile, ToricProfile, PointEvaluator>;

  static FunctionSpec make(std::string name, int dimension, Symmetry symmetry, Body body, double domain_radius = 1.0,
                           double extension_margin = 0.1, PoleStructure poles = PoleStructure::SinglePoleAtOrigin);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  Symmetry symmetry() const { return symmetry_; }
  double domain_radius() const { return domain_radius_; }
  double extension_margin() const { return extension_margin_; }
  PoleStructure pole_structure() const { return poles_; }
  const Body& body() const { return *body_; }
  const std::optional<Expr>& expression() const { return expr_; }
  /// Supremum of this function on the sphere |z| = domain_radius (sampled).
  double boundary_sup() const { return post_(raw_sup_); }
  double t_min() const;

  /// u(z) with domain check; z has 2n interleaved coordinates.
  ExtendedValue evaluate(std::span<const double> z) const;
  /// u(z) without domain check (-inf allowed).
  double value(std::span<const double> z) const;
  /// u(z) for log-domain coordinates, usable at |z| far below 1e-308.
  double value_deep(std::span<const LogReal> z) const;
  /// f(t) for RADIAL specs.
  double radial(double t) const;
  /// g(x) = u at |z_k| = e^{x_k}; RADIAL or TORIC specs.
  double toric(std::span<const double> x) const;
  /// The raw expression on points, used by symmetry spot checks. Falls back to value().
  double expression_value(std::span<const double> z) const;

  /// Shifted copy whose boundary supremum is 0.
  FunctionSpec normalized() const;
  /// G o u for nondecreasing G.
  FunctionSpec transformed(std::function<double(double)> G, const std::string& name) const;
  FunctionSpec renamed(const std::string& name) const;

  // load-time bookkeeping
  void set_expression(Expr e) { expr_ = std::move(e); }
  void set_raw_sup(double s) { raw_sup_ = s; }
  void set_pole_structure(PoleStructure p) { poles_ = p; }
  void set_t_min(double t) { t_min_ = t; }

 private:
  std::string name_;
  int dimension_ = 1;
  Symmetry symmetry_ = Symmetry::Radial;
  std::shared_ptr<const Body> body_;
  std::optional<Expr> expr_;
  double domain_radius_ = 1.0;
  double extension_margin_ = 0.1;
  PoleStructure poles_ = PoleStructure::SinglePoleAtOrigin;
  double raw_sup_ = 0.0;
  double t_min_ = std::numeric_limits<double>::quiet_NaN();
  std::function<double(double)> post_ = [](double v) { return v; };
};

struct LoadOptions {
  std::uint64_t seed = 20140201;
  int symmetry_samples = 64;
  double symmetry_tol = 1e-9;
  double t_min = -1e4;
};

/// Parses and validates a function-spec document (see README for schema).
/// Throws SCHEMA_ERROR, SYMMETRY_VIOLATION or NOT_PSH_PROFILE.
FunctionSpec load_spec(const nlohmann::json& document, const LoadOptions& options = {});
FunctionSpec load_spec_text(const std::string& text, const LoadOptions& options = {});

/// Builds a closed-form spec from an expression without running the checks.
FunctionSpec spec_from_expression(const std::string& name, int dimension, Symmetry symmetry, const Expr& expr,
                                  double domain_radius, double extension_margin, double t_min);

/// Runs the symmetry and plurisubharmonicity spot checks of load_spec.
void validate_spec(const FunctionSpec& spec, const LoadOptions& options);
/// Samples the boundary sphere and returns the supremum of the raw body.
double sample_boundary_sup(const FunctionSpec& spec, std::uint64_t seed);
PoleStructure detect_pole_structure(const FunctionSpec& spec);

}  // namespace pshsym
