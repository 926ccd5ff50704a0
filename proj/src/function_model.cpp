#include "function_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace pshsym {

const char* to_string(Symmetry s) {
  switch (s) {
    case Symmetry::Radial: return "radial";
    case Symmetry::Toric: return "toric";
    case Symmetry::S1Invariant: return "s1";
  }
  return "?";
}

const char* to_string(PoleStructure p) {
  switch (p) {
    case PoleStructure::SinglePoleAtOrigin: return "SINGLE_POLE_AT_ORIGIN";
    case PoleStructure::NontrivialPolarSet: return "NONTRIVIAL_POLAR_SET";
    case PoleStructure::NoPole: return "NO_POLE";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// RadialProfile

RadialProfile RadialProfile::closed_form(std::function<double(double)> f, double t_min) {
  RadialProfile p;
  p.kind_ = Kind::ClosedForm;
  p.f_ = std::move(f);
  p.t_min_ = t_min;
  return p;
}

RadialProfile RadialProfile::table(std::vector<Knot> knots, double floor) {
  if (knots.empty()) throw Error(ErrorCode::SchemaError, "table profile needs at least one knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].t) || !std::isfinite(knots[i].f))
      throw Error(ErrorCode::SchemaError, "table knots must be finite");
    if (i > 0 && !(knots[i].t > knots[i - 1].t))
      throw Error(ErrorCode::SchemaError, "table knots must have strictly increasing t");
  }
  RadialProfile p;
  p.kind_ = Kind::Table;
  p.knots_ = std::move(knots);
  p.t_min_ = p.knots_.front().t;
  p.floor_ = floor;
  return p;
}

double RadialProfile::tail_slope() const {
  if (kind_ != Kind::Table || knots_.size() < 2) return 0.0;
  return (knots_[1].f - knots_[0].f) / (knots_[1].t - knots_[0].t);
}

double RadialProfile::operator()(double t) const {
  if (kind_ == Kind::ClosedForm) return std::max(floor_, f_(t));
  const auto& k = knots_;
  double v;
  if (k.size() == 1) {
    v = k[0].f;
  } else if (t <= k.front().t) {
    const double s = tail_slope();
    v = (s == 0.0) ? k[0].f : k[0].f + s * (t - k[0].t);
  } else if (t >= k.back().t) {
    const auto& a = k[k.size() - 2];
    const auto& b = k.back();
    v = b.f + (b.f - a.f) / (b.t - a.t) * (t - b.t);
  } else {
    const auto it = std::upper_bound(k.begin(), k.end(), t, [](double x, const Knot& kn) { return x < kn.t; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    v = a.f + w * (b.f - a.f);
  }
  return std::max(floor_, v);
}

// ---------------------------------------------------------------------------
// FunctionSpec

FunctionSpec FunctionSpec::make(std::string name, int dimension, Symmetry symmetry, Body body, double domain_radius,
                                double extension_margin, PoleStructure poles) {
  if (dimension < 1) throw Error(ErrorCode::SchemaError, "dimension must be >= 1");
  if (!(domain_radius > 0)) throw Error(ErrorCode::SchemaError, "domain_radius must be > 0");
  if (!(extension_margin > 0)) throw Error(ErrorCode::SchemaError, "extension_margin must be > 0");
  const bool ok = (symmetry == Symmetry::Radial && std::holds_alternative<RadialProfile>(body)) ||
                  (symmetry == Symmetry::Toric && std::holds_alternative<ToricProfile>(body)) ||
                  (symmetry == Symmetry::S1Invariant && std::holds_alternative<PointEvaluator>(body));
  if (!ok) throw Error(ErrorCode::SchemaError, "body kind does not match declared symmetry");
  if (auto* tp = std::get_if<ToricProfile>(&body); tp && tp->arity() != dimension)
    throw Error(ErrorCode::SchemaError, "toric profile arity differs from dimension");
  FunctionSpec s;
  s.name_ = std::move(name);
  s.dimension_ = dimension;
  s.symmetry_ = symmetry;
  s.body_ = std::make_shared<const Body>(std::move(body));
  s.domain_radius_ = domain_radius;
  s.extension_margin_ = extension_margin;
  s.poles_ = poles;
  if (auto* rp = std::get_if<RadialProfile>(s.body_.get())) s.t_min_ = rp->t_min();
  return s;
}

double FunctionSpec::t_min() const { return std::isnan(t_min_) ? -1e4 : t_min_; }

namespace {

double log_norm(std::span<const double> z) {
  double acc = 0.0;
  for (double c : z) acc = std::hypot(acc, c);
  return std::log(acc);
}

}  // namespace

ExtendedValue FunctionSpec::evaluate(std::span<const double> z) const {
  if (z.size() != static_cast<std::size_t>(2 * dimension_))
    throw Error(ErrorCode::InvalidArgument, "point has " + std::to_string(z.size()) + " real coordinates, expected " +
                                                std::to_string(2 * dimension_));
  const double r = std::exp(log_norm(z));
  if (r > domain_radius_ * (1.0 + extension_margin_) * (1.0 + 1e-12))
    throw Error(ErrorCode::OutOfDomain, "|z| = " + std::to_string(r) + " exceeds extended radius");
  return ExtendedValue(value(z));
}

double FunctionSpec::value(std::span<const double> z) const {
  double v;
  if (const auto* rp = std::get_if<RadialProfile>(body_.get())) {
    v = (*rp)(log_norm(z));
  } else if (const auto* tp = std::get_if<ToricProfile>(body_.get())) {
    double x[16];
    std::vector<double> xv;
    double* xp = x;
    if (dimension_ > 16) {
      xv.resize(dimension_);
      xp = xv.data();
    }
    for (int k = 0; k < dimension_; ++k) xp[k] = std::log(std::hypot(z[2 * k], z[2 * k + 1]));
    v = (*tp)(std::span<const double>(xp, dimension_));
  } else {
    const auto& pe = std::get<PointEvaluator>(*body_);
    v = pe.fast(z);
    if (!std::isfinite(v) && pe.deep) {
      std::vector<LogReal> zl(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) zl[i] = LogReal::from_double(z[i]);
      v = pe.deep(zl).to_double();
    }
  }
  return post_(v);
}

double FunctionSpec::value_deep(std::span<const LogReal> z) const {
  double v;
  if (const auto* rp = std::get_if<RadialProfile>(body_.get())) {
    LogReal acc = z[0];
    for (std::size_t i = 1; i < z.size(); ++i) acc = hypot(acc, z[i]);
    v = (*rp)(acc.logmag);
  } else if (const auto* tp = std::get_if<ToricProfile>(body_.get())) {
    std::vector<double> x(dimension_);
    for (int k = 0; k < dimension_; ++k) x[k] = hypot(z[2 * k], z[2 * k + 1]).logmag;
    v = (*tp)(x);
  } else {
    const auto& pe = std::get<PointEvaluator>(*body_);
    if (pe.deep) {
      v = pe.deep(z).to_double();
    } else {
      std::vector<double> zd(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) zd[i] = z[i].to_double();
      v = pe.fast(zd);
    }
  }
  return post_(v);
}

double FunctionSpec::radial(double t) const {
  const auto* rp = std::get_if<RadialProfile>(body_.get());
  if (!rp) throw Error(ErrorCode::SymmetryRequired, "radial profile requested for non-radial spec " + name_);
  return post_((*rp)(t));
}

double FunctionSpec::toric(std::span<const double> x) const {
  if (const auto* tp = std::get_if<ToricProfile>(body_.get())) return post_((*tp)(x));
  if (const auto* rp = std::get_if<RadialProfile>(body_.get())) {
    double acc = kNegInf;
    for (double xi : x) acc = detail::log_add_exp(acc, 2.0 * xi);
    return post_((*rp)(0.5 * acc));
  }
  throw Error(ErrorCode::SymmetryRequired, "toric profile requested for S1-invariant spec " + name_);
}

double FunctionSpec::expression_value(std::span<const double> z) const {
  if (!expr_) return value(z);
  double v = evaluate_expr<double>(*expr_, z);
  if (!std::isfinite(v)) {
    std::vector<LogReal> zl(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) zl[i] = LogReal::from_double(z[i]);
    v = evaluate_expr<LogReal>(*expr_, std::span<const LogReal>(zl)).to_double();
  }
  return post_(v);
}

FunctionSpec FunctionSpec::normalized() const {
  FunctionSpec s = *this;
  const double shift = boundary_sup();
  if (shift == 0.0) return s;
  auto prev = post_;
  s.post_ = [prev, shift](double v) { return prev(v) - shift; };
  return s;
}

FunctionSpec FunctionSpec::transformed(std::function<double(double)> G, const std::string& name) const {
  FunctionSpec s = *this;
  auto prev = post_;
  s.post_ = [prev, G](double v) { return G(prev(v)); };
  s.name_ = name;
  s.expr_.reset();
  if (std::isfinite(s.post_(kNegInf))) s.poles_ = PoleStructure::NoPole;
  return s;
}

FunctionSpec FunctionSpec::renamed(const std::string& name) const {
  FunctionSpec s = *this;
  s.name_ = name;
  return s;
}

// ---------------------------------------------------------------------------
// expression-backed bodies

namespace {

bool all_finite_or_zero(std::span<const double> x) {
  for (double v : x)
    if (v < -700.0 && v != kNegInf) return false;
  return true;
}

}  // namespace

FunctionSpec spec_from_expression(const std::string& name, int n, Symmetry symmetry, const Expr& expr,
                                  double domain_radius, double extension_margin, double t_min) {
  auto e = std::make_shared<const Expr>(expr);
  FunctionSpec::Body body = PointEvaluator{};
  if (symmetry == Symmetry::Radial) {
    auto f = [e, n](double t) {
      if (t > -700.0 || t == kNegInf) {
        std::vector<double> z(2 * n, 0.0);
        z[0] = std::exp(t);
        const double v = evaluate_expr<double>(*e, z);
        if (std::isfinite(v) || t == kNegInf) return v;
      }
      std::vector<LogReal> z(2 * n);
      z[0] = LogReal::from_log(t);
      return evaluate_expr<LogReal>(*e, std::span<const LogReal>(z)).to_double();
    };
    body = RadialProfile::closed_form(f, t_min);
  } else if (symmetry == Symmetry::Toric) {
    auto g = [e, n](std::span<const double> x) {
      if (all_finite_or_zero(x)) {
        double buf[32] = {};
        std::vector<double> heap;
        double* z = buf;
        if (2 * n > 32) {
          heap.assign(2 * n, 0.0);
          z = heap.data();
        }
        for (int k = 0; k < n; ++k) z[2 * k] = std::exp(x[k]);
        const double v = evaluate_expr<double>(*e, std::span<const double>(z, 2 * n));
        if (std::isfinite(v)) return v;
      }
      std::vector<LogReal> z(2 * n);
      for (int k = 0; k < n; ++k) z[2 * k] = LogReal::from_log(x[k]);
      return evaluate_expr<LogReal>(*e, std::span<const LogReal>(z)).to_double();
    };
    body = ToricProfile(n, g);
  } else {
    PointEvaluator pe;
    pe.fast = [e](std::span<const double> z) { return evaluate_expr<double>(*e, z); };
    pe.deep = [e](std::span<const LogReal> z) { return evaluate_expr<LogReal>(*e, z); };
    body = pe;
  }
  FunctionSpec s = FunctionSpec::make(name, n, symmetry, std::move(body), domain_radius, extension_margin);
  s.set_expression(expr);
  s.set_t_min(t_min);
  return s;
}

// ---------------------------------------------------------------------------
// checks

namespace {

std::string fmt_point(std::span<const double> z) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (std::size_t i = 0; i < z.size(); ++i) os << (i ? ", " : "") << z[i];
  os << ")";
  return os.str();
}

std::vector<double> random_point_in_ball(const CounterRng& rng, std::uint64_t& ctr, int n, double radius) {
  std::vector<double> z(2 * n);
  double norm = 0.0;
  for (auto& c : z) {
    c = rng.normal(ctr++);
    norm = std::hypot(norm, c);
  }
  const double r = radius * std::pow(rng.uniform(ctr++), 1.0 / (2.0 * n));
  for (auto& c : z) c *= r / norm;
  return z;
}

bool close(double a, double b, double tol) {
  if (a == kNegInf || b == kNegInf) return a == b;
  return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(a));
}

void check_symmetry(const FunctionSpec& spec, const LoadOptions& opt) {
  if (!spec.expression()) return;
  const int n = spec.dimension();
  const double R = spec.domain_radius() * (1.0 + spec.extension_margin()) * 0.999;
  CounterRng rng(opt.seed, 0x5157);
  std::uint64_t ctr = 0;
  for (int i = 0; i < opt.symmetry_samples; ++i) {
    auto z = random_point_in_ball(rng, ctr, n, R);
    std::vector<double> w(z.size());
    std::string how;
    if (spec.symmetry() == Symmetry::Radial) {
      double r = 0.0;
      for (double c : z) r = std::hypot(r, c);
      w = random_point_in_ball(rng, ctr, n, 1.0);
      double rn = 0.0;
      for (double c : w) rn = std::hypot(rn, c);
      for (auto& c : w) c *= r / rn;
      how = "rotation to " + fmt_point(w);
    } else {
      const double common = 2.0 * std::numbers::pi * rng.uniform(ctr++);
      std::ostringstream os;
      os << "phases (";
      for (int k = 0; k < n; ++k) {
        const double th = spec.symmetry() == Symmetry::Toric ? 2.0 * std::numbers::pi * rng.uniform(ctr++) : common;
        w[2 * k] = std::cos(th) * z[2 * k] - std::sin(th) * z[2 * k + 1];
        w[2 * k + 1] = std::sin(th) * z[2 * k] + std::cos(th) * z[2 * k + 1];
        os << (k ? ", " : "") << th;
      }
      os << ")";
      how = os.str();
    }
    const double a = spec.expression_value(z);
    const double b = spec.expression_value(w);
    if (!close(a, b, opt.symmetry_tol))
      throw Error(ErrorCode::SymmetryViolation, std::string("declared ") + to_string(spec.symmetry()) +
                                                    " but u(z) = " + std::to_string(a) + " at z = " + fmt_point(z) +
                                                    " and u = " + std::to_string(b) + " after " + how);
  }
}

double psh_tol(double a, double b, double c) {
  return 1e-9 * (1.0 + std::fabs(a) + std::fabs(b) + std::fabs(c));
}

void check_convex_triple(double t1, double t2, double t3, double f1, double f2, double f3, const std::string& where) {
  if (!std::isfinite(f1) || !std::isfinite(f2) || !std::isfinite(f3)) return;
  if (f2 < f1 - psh_tol(f1, f2, 0) || f3 < f2 - psh_tol(f2, f3, 0)) {
    std::ostringstream os;
    os << where << " is decreasing: f(" << t1 << ")=" << f1 << ", f(" << t2 << ")=" << f2 << ", f(" << t3
       << ")=" << f3;
    throw Error(ErrorCode::NotPshProfile, os.str());
  }
  const double chord = f1 + (f3 - f1) * (t2 - t1) / (t3 - t1);
  if (f2 > chord + psh_tol(f1, f2, f3)) {
    std::ostringstream os;
    os << where << " is not convex: witness triple t=(" << t1 << ", " << t2 << ", " << t3 << "), f=(" << f1
       << ", " << f2 << ", " << f3 << "), excess " << (f2 - chord);
    throw Error(ErrorCode::NotPshProfile, os.str());
  }
}

void check_radial(const FunctionSpec& spec) {
  const auto& rp = std::get<RadialProfile>(spec.body());
  const double top = std::log(spec.domain_radius() * (1.0 + spec.extension_margin()));
  std::vector<double> ts;
  if (rp.kind() == RadialProfile::Kind::Table) {
    for (const auto& k : rp.knots()) ts.push_back(k.t);
  } else {
    for (int i = 0; i < 96; ++i) ts.push_back(-60.0 + (top + 60.0) * i / 95.0);
    const double deep = std::min(-60.0, spec.t_min());
    for (int i = 1; i < 32; ++i) ts.push_back(-60.0 * std::pow(deep / -60.0, i / 31.0));
    std::sort(ts.begin(), ts.end());
  }
  if (ts.size() == 2) {
    const double f0 = rp(ts[0]), f1 = rp(ts[1]);
    if (f1 < f0 - psh_tol(f0, f1, 0))
      throw Error(ErrorCode::NotPshProfile, "radial profile is decreasing between its two knots");
  }
  for (std::size_t i = 0; i + 2 < ts.size(); ++i)
    check_convex_triple(ts[i], ts[i + 1], ts[i + 2], rp(ts[i]), rp(ts[i + 1]), rp(ts[i + 2]), "radial profile");
}

void check_toric(const FunctionSpec& spec, const LoadOptions& opt) {
  const int n = spec.dimension();
  const double R = spec.domain_radius() * (1.0 + spec.extension_margin());
  CounterRng rng(opt.seed, 0x70c1c);
  std::uint64_t ctr = 0;
  auto sample = [&] {
    // log-uniform radius down to e^{-30}, direction in the positive orthant
    std::vector<double> w(n);
    double norm = 0.0;
    for (auto& c : w) {
      c = std::fabs(rng.normal(ctr++)) + 1e-12;
      norm = std::hypot(norm, c);
    }
    const double logr = std::log(R * 0.999) - 30.0 * rng.uniform(ctr++);
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = logr + std::log(w[k] / norm);
    return x;
  };
  auto where = [](const std::vector<double>& x) { return "toric profile at x = " + fmt_point(x); };
  for (int i = 0; i < opt.symmetry_samples; ++i) {
    auto x = sample();
    const double gx = spec.toric(x);
    for (int k = 0; k < n; ++k) {
      auto y = x;
      y[k] -= 5.0 * rng.uniform(ctr++);
      const double gy = spec.toric(y);
      if (std::isfinite(gx) && std::isfinite(gy) && gy > gx + psh_tol(gx, gy, 0))
        throw Error(ErrorCode::NotPshProfile, where(x) + " is decreasing in coordinate " + std::to_string(k + 1) +
                                                  ": g(y)=" + std::to_string(gy) + " > g(x)=" + std::to_string(gx) +
                                                  " at y = " + fmt_point(y));
    }
    auto y = sample();
    std::vector<double> m(n);
    for (int k = 0; k < n; ++k) m[k] = 0.5 * (x[k] + y[k]);
    const double gy = spec.toric(y), gm = spec.toric(m);
    if (std::isfinite(gx) && std::isfinite(gy) && std::isfinite(gm) && gm > 0.5 * (gx + gy) + psh_tol(gx, gy, gm))
      throw Error(ErrorCode::NotPshProfile, where(m) + " violates midpoint convexity between " + fmt_point(x) +
                                                " and " + fmt_point(y) + ", excess " +
                                                std::to_string(gm - 0.5 * (gx + gy)));
  }
}

void check_s1(const FunctionSpec& spec, const LoadOptions& opt) {
  // restricted to a complex line through 0, an S1-invariant psh function is a
  // convex nondecreasing function of log|lambda|
  const int n = spec.dimension();
  const double top = std::log(spec.domain_radius() * (1.0 + spec.extension_margin()) * 0.999);
  CounterRng rng(opt.seed, 0x51);
  std::uint64_t ctr = 0;
  for (int i = 0; i < opt.symmetry_samples; ++i) {
    auto w = random_point_in_ball(rng, ctr, n, 1.0);
    double norm = 0.0;
    for (double c : w) norm = std::hypot(norm, c);
    for (auto& c : w) c /= norm;
    double t[3];
    for (auto& ti : t) ti = top - 20.0 * rng.uniform(ctr++);
    std::sort(t, t + 3);
    if (t[2] - t[0] < 1e-6) continue;
    double f[3];
    for (int j = 0; j < 3; ++j) {
      std::vector<double> z(w);
      for (auto& c : z) c *= std::exp(t[j]);
      f[j] = spec.expression_value(z);
    }
    check_convex_triple(t[0], t[1], t[2], f[0], f[1], f[2], "restriction to the line through " + fmt_point(w));
  }
}

}  // namespace

void validate_spec(const FunctionSpec& spec, const LoadOptions& options) {
  check_symmetry(spec, options);
  switch (spec.symmetry()) {
    case Symmetry::Radial: check_radial(spec); break;
    case Symmetry::Toric: check_toric(spec, options); break;
    case Symmetry::S1Invariant: check_s1(spec, options); break;
  }
}

double sample_boundary_sup(const FunctionSpec& spec, std::uint64_t seed) {
  const int n = spec.dimension();
  const double R = spec.domain_radius();
  if (spec.symmetry() == Symmetry::Radial) return spec.radial(std::log(R));
  if (spec.symmetry() == Symmetry::Toric && n == 1) {
    const double x = std::log(R);
    return spec.toric(std::span<const double>(&x, 1));
  }
  if (spec.symmetry() == Symmetry::Toric && n == 2) {
    auto at = [&](double phi) {
      const double x[2] = {std::log(R * std::cos(phi)), std::log(R * std::sin(phi))};
      return spec.toric(x);
    };
    const int m = 1024;
    const double h = std::numbers::pi / 2 / m;
    int best = 0;
    double best_v = kNegInf;
    for (int i = 0; i <= m; ++i) {
      const double phi = (i == m) ? std::numbers::pi / 2 : i * h;
      const double v = at(phi);
      if (v > best_v) best_v = v, best = i;
    }
    // golden-section refinement around the best grid angle
    double a = std::max(0.0, (best - 1) * h), b = std::min(std::numbers::pi / 2, (best + 1) * h);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = at(c), fd = at(d);
    for (int it = 0; it < 80; ++it) {
      if (fc > fd) {
        b = d, d = c, fd = fc, c = b - gr * (b - a), fc = at(c);
      } else {
        a = c, c = d, fc = fd, d = a + gr * (b - a), fd = at(d);
      }
    }
    return std::max({best_v, fc, fd});
  }
  CounterRng rng(seed, 0xB0);
  std::uint64_t ctr = 0;
  double best = kNegInf;
  std::vector<double> z(2 * n);
  for (int i = 0; i < 4096; ++i) {
    double norm = 0.0;
    for (auto& c : z) {
      c = rng.normal(ctr++);
      norm = std::hypot(norm, c);
    }
    for (auto& c : z) c *= R / norm;
    best = std::max(best, spec.value(z));
  }
  if (spec.symmetry() == Symmetry::Toric) {
    for (int k = 0; k < n; ++k) {
      std::fill(z.begin(), z.end(), 0.0);
      z[2 * k] = R;
      best = std::max(best, spec.value(z));
    }
  }
  return best;
}

PoleStructure detect_pole_structure(const FunctionSpec& spec) {
  const int n = spec.dimension();
  if (spec.symmetry() == Symmetry::Radial)
    return spec.radial(kNegInf) == kNegInf ? PoleStructure::SinglePoleAtOrigin : PoleStructure::NoPole;
  if (spec.symmetry() == Symmetry::Toric) {
    const double mid = std::log(spec.domain_radius() / (2.0 * std::sqrt(static_cast<double>(n))));
    if (n > 1) {
      for (int k = 0; k < n; ++k) {
        std::vector<double> x(n, mid);
        x[k] = kNegInf;
        if (spec.toric(x) == kNegInf) return PoleStructure::NontrivialPolarSet;
      }
    }
    std::vector<double> x(n, kNegInf);
    return spec.toric(x) == kNegInf ? PoleStructure::SinglePoleAtOrigin : PoleStructure::NoPole;
  }
  std::vector<double> z(2 * n, 0.0);
  if (spec.value(z) != kNegInf) return PoleStructure::NoPole;
  if (n > 1) {
    const double mid = spec.domain_radius() / (2.0 * std::sqrt(static_cast<double>(n)));
    for (int k = 0; k < n; ++k) {
      std::fill(z.begin(), z.end(), mid);
      z[2 * k] = z[2 * k + 1] = 0.0;
      if (spec.value(z) == kNegInf) return PoleStructure::NontrivialPolarSet;
    }
  }
  return PoleStructure::SinglePoleAtOrigin;
}

// ---------------------------------------------------------------------------
// loading

namespace {

template <class T>
T field(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::SchemaError, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

FunctionSpec load_spec(const nlohmann::json& doc, const LoadOptions& options) {
  if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "spec document must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    static const char* known[] = {"name", "dimension", "symmetry", "body", "domain_radius",
                                  "extension_margin", "pole_structure", "t_min"};
    if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; }))
      throw Error(ErrorCode::SchemaError, "unknown field '" + key + "'");
  }
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
    throw Error(ErrorCode::SchemaError, "'dimension' must be an integer");
  const int n = doc["dimension"].get<int>();
  if (n < 1 || n > 16) throw Error(ErrorCode::SchemaError, "'dimension' must be in 1..16");
  const std::string sym = field<std::string>(doc, "symmetry", "");
  Symmetry symmetry;
  if (sym == "radial") symmetry = Symmetry::Radial;
  else if (sym == "toric") symmetry = Symmetry::Toric;
  else if (sym == "s1") symmetry = Symmetry::S1Invariant;
  else throw Error(ErrorCode::SchemaError, "'symmetry' must be radial, toric or s1");
  const std::string name = field<std::string>(doc, "name", "spec");
  const double R = field<double>(doc, "domain_radius", 1.0);
  const double delta = field<double>(doc, "extension_margin", 0.1);
  const double t_min = field<double>(doc, "t_min", options.t_min);
  if (!(R > 0)) throw Error(ErrorCode::SchemaError, "'domain_radius' must be > 0");
  if (!(delta > 0)) throw Error(ErrorCode::SchemaError, "'extension_margin' must be > 0");
  if (!(t_min < 0)) throw Error(ErrorCode::SchemaError, "'t_min' must be negative");

  if (!doc.contains("body") || !doc["body"].is_object()) throw Error(ErrorCode::SchemaError, "'body' must be an object");
  const auto& body = doc["body"];
  const std::string kind = field<std::string>(body, "kind", "");

  FunctionSpec spec;
  if (kind == "closed_form") {
    if (!body.contains("expr")) throw Error(ErrorCode::SchemaError, "closed_form body needs 'expr'");
    const Expr e = parse_expression(body["expr"], n);
    spec = spec_from_expression(name, n, symmetry, e, R, delta, t_min);
  } else if (kind == "table") {
    if (symmetry != Symmetry::Radial) throw Error(ErrorCode::SchemaError, "table bodies are radial profiles only");
    if (!body.contains("knots") || !body["knots"].is_array())
      throw Error(ErrorCode::SchemaError, "table body needs 'knots'");
    std::vector<Knot> knots;
    for (const auto& k : body["knots"]) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
        throw Error(ErrorCode::SchemaError, "knot must be [t, f]");
      knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    spec = FunctionSpec::make(name, n, symmetry, RadialProfile::table(std::move(knots)), R, delta);
  } else {
    throw Error(ErrorCode::SchemaError, "body.kind must be closed_form or table");
  }

  validate_spec(spec, options);
  spec.set_raw_sup(sample_boundary_sup(spec, options.seed));
  if (doc.contains("pole_structure")) {
    const std::string p = field<std::string>(doc, "pole_structure", "");
    if (p == "single_pole") spec.set_pole_structure(PoleStructure::SinglePoleAtOrigin);
    else if (p == "polar_set") spec.set_pole_structure(PoleStructure::NontrivialPolarSet);
    else if (p == "none") spec.set_pole_structure(PoleStructure::NoPole);
    else throw Error(ErrorCode::SchemaError, "'pole_structure' must be single_pole, polar_set or none");
  } else {
    spec.set_pole_structure(detect_pole_structure(spec));
  }
  return spec;
}

FunctionSpec load_spec_text(const std::string& text, const LoadOptions& options) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what());
  }
  return load_spec(doc, options);
}

}  // namespace pshsym
