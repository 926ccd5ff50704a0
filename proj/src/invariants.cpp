#include "invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "volume_engine.hpp"

namespace pshsym {

namespace {

constexpr std::uint64_t kSphereStream = 0x5e1e;
constexpr std::uint64_t kPointStream = 0x9017;

std::vector<std::vector<double>> sphere_points(int real_dim, int count, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::vector<std::vector<double>> pts(count, std::vector<double>(real_dim));
  std::uint64_t c = 0;
  for (auto& p : pts) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : p) {
        v = rng.normal(c++);
        norm = std::hypot(norm, v);
      }
    } while (!(norm > 1e-12));
    for (double& v : p) v /= norm;
  }
  return pts;
}

/// max over the sampled unit directions w of u(center + e^s w), in log domain.
double max_on_sphere(const FunctionSpec& spec, std::span<const double> center,
                     const std::vector<std::vector<double>>& dirs, double s) {
  const std::size_t m = center.size();
  std::vector<LogReal> z(m);
  double best = kNegInf;
  for (const auto& w : dirs) {
    for (std::size_t i = 0; i < m; ++i) {
      const LogReal step = w[i] == 0.0 ? LogReal::zero() : LogReal::from_log(s + std::log(std::fabs(w[i])), w[i] > 0 ? 1 : -1);
      z[i] = LogReal::from_double(center[i]) + step;
    }
    const double v = spec.value_deep(z);
    if (v > best) best = v;
  }
  return best;
}

SlopeEstimate fit_finite(const std::vector<double>& t, const std::vector<double>& y, SlopeMethod method,
                         const RunConfig& config) {
  std::vector<double> tt, yy;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::isfinite(y[i])) {
      tt.push_back(t[i]);
      yy.push_back(y[i]);
    }
  if (tt.size() < 4) throw Error(ErrorCode::ToleranceNotMet, "fewer than 4 finite values in the slope window");
  auto s = fit_asymptotic_slope(tt, yy, method, config.stability_floor);
  if (tt.size() < t.size()) {
    s.window_shrunk = true;
    s.note += (s.note.empty() ? "" : "; ") + std::to_string(t.size() - tt.size()) + " non-finite samples dropped";
  }
  return s;
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double standard_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

// ---------------------------------------------------------------------------
// Lelong numbers

SlopeEstimate lelong_origin(const FunctionSpec& spec, const RunConfig& config) {
  const auto ts = slope_window(config.t_min, config.slope_points);
  std::vector<double> y(ts.size());
  SlopeMethod method = SlopeMethod::ProfileDerivative;
  switch (spec.symmetry()) {
    case Symmetry::Radial:
      for (std::size_t i = 0; i < ts.size(); ++i) y[i] = spec.radial(ts[i]);
      break;
    case Symmetry::Toric: {
      method = SlopeMethod::MeanOnTori;
      std::vector<double> x(spec.dimension());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        std::fill(x.begin(), x.end(), ts[i]);
        y[i] = spec.toric(x);
      }
      break;
    }
    case Symmetry::S1Invariant: {
      method = SlopeMethod::MaxOnSpheres;
      const auto dirs = sphere_points(2 * spec.dimension(), config.sphere_samples, config.seed, kSphereStream);
      const std::vector<double> origin(2 * spec.dimension(), 0.0);
      parallel_for(ts.size(), config.workers, [&](std::size_t i) { y[i] = max_on_sphere(spec, origin, dirs, ts[i]); });
      break;
    }
  }
  return fit_finite(ts, y, method, config);
}

SlopeEstimate lelong_at_point(const FunctionSpec& spec, std::span<const double> x, const RunConfig& config) {
  if (x.size() != static_cast<std::size_t>(2 * spec.dimension()))
    throw Error(ErrorCode::InvalidArgument, "point must have 2n real coordinates");
  double r = 0.0;
  for (double v : x) r = std::hypot(r, v);
  if (!(r < spec.domain_radius())) throw Error(ErrorCode::OutOfDomain, "point outside the domain ball");
  const auto ts = slope_window(config.t_min, config.point_radii);
  const auto dirs = sphere_points(2 * spec.dimension(), config.point_sphere_samples, config.seed, kSphereStream + 1);
  std::vector<double> y(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) y[i] = max_on_sphere(spec, x, dirs, ts[i]);
  return fit_finite(ts, y, SlopeMethod::MaxOnSpheres, config);
}

SlopeEstimate refined_lelong(const FunctionSpec& spec, std::span<const double> a, const RunConfig& config) {
  if (spec.symmetry() == Symmetry::S1Invariant)
    throw Error(ErrorCode::SymmetryRequired, "refined Lelong numbers need a toric or radial spec");
  if (a.size() != static_cast<std::size_t>(spec.dimension()))
    throw Error(ErrorCode::InvalidArgument, "direction must have n entries");
  for (double v : a)
    if (!(v > 0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "direction entries must be > 0");
  const auto ts = slope_window(config.t_min, config.slope_points);
  std::vector<double> y(ts.size());
  if (spec.symmetry() == Symmetry::Radial) {
    const double amin = *std::min_element(a.begin(), a.end());
    for (std::size_t i = 0; i < ts.size(); ++i) y[i] = spec.radial(ts[i] * amin);
  } else {
    std::vector<double> x(a.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (std::size_t k = 0; k < a.size(); ++k) x[k] = a[k] * ts[i];
      y[i] = spec.toric(x);
    }
  }
  return fit_finite(ts, y, SlopeMethod::MeanOnTori, config);
}

SlopeEstimate integrability_index_volume(const FunctionSpec& spec, const RunConfig& config) {
  const FunctionSpec src = spec.normalized();
  double t_lo = config.t_min;
  std::size_t first_usable = 0;
  for (int attempt = 0; attempt < 6; ++attempt, t_lo /= 3.0) {
    auto ts = slope_window(t_lo, config.slope_points);
    std::reverse(ts.begin(), ts.end());
    const auto prof = volume_profile(src, ts, config);
    std::vector<double> t, logmu;
    for (const auto& p : prof.points)
      if (!p.failed && !p.estimate.empty && std::isfinite(p.estimate.log_value)) {
        t.push_back(p.t);
        logmu.push_back(p.estimate.log_value);
      }
    if (attempt == 0) first_usable = t.size();
    if (static_cast<int>(t.size()) < config.slope_points / 2) continue;

    const auto k = fit_asymptotic_slope(t, logmu, SlopeMethod::VolumeLogRatio, config.stability_floor, false);
    SlopeEstimate s = k;
    s.slope = 2.0 / k.slope;
    s.std_error = 2.0 * k.std_error / (k.slope * k.slope);
    s.refit_slope = 2.0 / k.refit_slope;
    s.unstable = !(k.slope > 0) || std::fabs(s.refit_slope - s.slope) > std::max(3.0 * s.std_error, config.stability_floor);
    s.note = "log mu slope " + std::to_string(k.slope);
    if (attempt > 0 || t.size() < ts.size()) {
      s.window_shrunk = true;
      const std::size_t dropped = ts.size() - (attempt == 0 ? t.size() : first_usable);
      s.note += "; DEGENERATE_VOLUME: " + std::to_string(dropped) + " of " + std::to_string(ts.size()) +
                " levels on [" + std::to_string(config.t_min) + ", " + std::to_string(config.t_min / 3) +
                "] without usable volume";
      if (attempt > 0) s.note += ", window moved up " + std::to_string(attempt) + " times";
    }
    return s;
  }
  throw Error(ErrorCode::ToleranceNotMet, "no usable volumes in any slope window for " + spec.name());
}

namespace {

double profile_window_start(const RadialProfile& p) {
  const double t0 = p.kind() == RadialProfile::Kind::Table ? p.knots().front().t : p.t_min();
  if (!(t0 < 0) || !std::isfinite(t0)) throw Error(ErrorCode::InvalidArgument, "profile has no deep window");
  return t0;
}

SlopeEstimate profile_slope(const RadialProfile& p, const RunConfig& config) {
  const auto ts = slope_window(profile_window_start(p), config.slope_points);
  std::vector<double> y(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) y[i] = p(ts[i]);
  return fit_finite(ts, y, SlopeMethod::ProfileDerivative, config);
}

}  // namespace

SlopeEstimate lelong_symmetrized(const SymmetrizationResult& result, const RunConfig& config) {
  return profile_slope(result.profile(), config);
}

// ---------------------------------------------------------------------------
// simplex optimizer

namespace {

void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = 1; k <= total - parts + 1; ++k) {
    cur.push_back(k);
    compositions(total - k, parts - 1, cur, out);
    cur.pop_back();
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <class Objective>
SimplexMaximum maximize_on_simplex(int n, const RunConfig& config, Objective&& objective) {
  SimplexMaximum best;
  int grid = std::max(config.simplex_grid, n);
  while (grid > n && binomial(grid - 1, n - 1) > 5000) --grid;
  best.grid = grid;

  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  compositions(grid, n, cur, comps);
  std::vector<std::vector<double>> pts(comps.size(), std::vector<double>(n));
  for (std::size_t i = 0; i < comps.size(); ++i)
    for (int k = 0; k < n; ++k) pts[i][k] = static_cast<double>(comps[i][k]) / grid;

  std::vector<std::pair<double, SlopeEstimate>> vals(pts.size());
  parallel_for(pts.size(), config.workers, [&](std::size_t i) { vals[i] = objective(pts[i]); });
  best.evaluations = static_cast<int>(pts.size());

  std::size_t arg = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i].first > vals[arg].first + 1e-12 * std::max(1.0, std::fabs(vals[arg].first))) arg = i;
  std::vector<double> a = pts[arg];
  double value = vals[arg].first;
  SlopeEstimate slope = vals[arg].second;

  // Pattern moves: e_i - e_j, and one coordinate against all others, which
  // crosses kinks of min-type objectives that pairwise moves cannot.
  std::vector<std::vector<double>> moves;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        std::vector<double> d(n, 0.0);
        d[i] = 1.0;
        d[j] = -1.0;
        moves.push_back(d);
      }
  if (n > 2)
    for (int j = 0; j < n; ++j)
      for (double sign : {1.0, -1.0}) {
        std::vector<double> d(n, -sign / (n - 1));
        d[j] = sign;
        moves.push_back(d);
      }

  double h = 1.0 / grid;
  while (h >= config.simplex_tol && n > 1) {
    bool improved = false;
    for (const auto& d : moves) {
      std::vector<double> b = a;
      bool feasible = true;
      for (int k = 0; k < n; ++k) {
        b[k] += h * d[k];
        feasible = feasible && b[k] > 0.0;
      }
      if (!feasible) continue;
      auto v = objective(b);
      ++best.evaluations;
      if (v.first > value + 1e-12 * std::max(1.0, std::fabs(value))) {
        a = std::move(b);
        value = v.first;
        slope = v.second;
        improved = true;
        break;
      }
    }
    if (!improved) h *= 0.5;
  }

  best.a = a;
  best.value = value;
  best.slope = slope;
  best.boundary = *std::min_element(a.begin(), a.end()) < 1.0 / grid;
  return best;
}

}  // namespace

SimplexMaximum integrability_index_kiselman(const FunctionSpec& spec, const RunConfig& config) {
  if (spec.symmetry() == Symmetry::S1Invariant)
    throw Error(ErrorCode::SymmetryRequired, "the Kiselman estimator needs a toric or radial spec");
  return maximize_on_simplex(spec.dimension(), config, [&](const std::vector<double>& a) {
    auto s = refined_lelong(spec, a, config);
    return std::pair{s.slope, s};
  });
}

SimplexMaximum rashkovskii_lower_bound(const FunctionSpec& spec, const RunConfig& config) {
  if (spec.symmetry() == Symmetry::S1Invariant)
    throw Error(ErrorCode::SymmetryRequired, "the Rashkovskii bound needs a toric or radial spec");
  if (spec.pole_structure() != PoleStructure::SinglePoleAtOrigin)
    throw Error(ErrorCode::SinglePoleRequired,
                spec.name() + " has pole structure " + to_string(spec.pole_structure()));
  const int n = spec.dimension();
  return maximize_on_simplex(n, config, [&](const std::vector<double>& a) {
    auto s = refined_lelong(spec, a, config);
    double v = std::pow(s.slope, n);
    for (double ak : a) v /= ak;
    return std::pair{v, s};
  });
}

// ---------------------------------------------------------------------------
// radial Monge-Ampere

ResidueMass residue_mass_radial(const RadialProfile& profile, int n, const RunConfig& config) {
  ResidueMass r;
  r.slope = profile_slope(profile, config);
  r.value = std::pow(r.slope.slope, n);
  return r;
}

namespace {

double smoothing_width(double width, double t) { return width * std::max(1.0, std::fabs(t) / 100.0); }

// Kinks of a piecewise linear table as f0 + b0 (t - t0) + sum c_i (t - t_i)_+.
struct KinkSum {
  double t0 = 0, f0 = 0, b0 = 0, width = 0;
  std::vector<double> tk, ck, prefix_c, prefix_ct;

  double operator()(double t) const {
    const double reach = 8.0 * width * std::max(1.0, (std::fabs(t) + 1.0) / 50.0);
    const auto lo = std::lower_bound(tk.begin(), tk.end(), t - reach) - tk.begin();
    const auto hi = std::upper_bound(tk.begin(), tk.end(), t + reach) - tk.begin();
    double v = f0 + b0 * (t - t0);
    if (lo > 0) v += prefix_c[lo - 1] * t - prefix_ct[lo - 1];
    for (auto i = lo; i < hi; ++i) {
      const double d = smoothing_width(width, tk[i]);
      const double z = (t - tk[i]) / d;
      v += ck[i] * d * (z * standard_normal_cdf(z) + standard_normal_pdf(z));
    }
    return v;
  }
};

std::vector<double> table_kinks(const RadialProfile& p) {
  std::vector<double> t;
  for (const auto& k : p.knots()) t.push_back(k.t);
  return t;
}

}  // namespace

RadialProfile mollified(const RadialProfile& table, double width) {
  if (table.kind() != RadialProfile::Kind::Table) return table;
  const auto& k = table.knots();
  if (k.size() < 2) return table;
  auto ks = std::make_shared<KinkSum>();
  ks->width = width;
  ks->t0 = k[0].t;
  ks->f0 = k[0].f;
  ks->b0 = (k[1].f - k[0].f) / (k[1].t - k[0].t);
  double prev = ks->b0, pc = 0, pct = 0;
  for (std::size_t i = 1; i + 1 < k.size(); ++i) {
    const double s = (k[i + 1].f - k[i].f) / (k[i + 1].t - k[i].t);
    ks->tk.push_back(k[i].t);
    ks->ck.push_back(s - prev);
    pc += s - prev;
    pct += (s - prev) * k[i].t;
    ks->prefix_c.push_back(pc);
    ks->prefix_ct.push_back(pct);
    prev = s;
  }
  return RadialProfile::closed_form([ks](double t) { return (*ks)(t); }, k[0].t);
}

MaConsistencyReport radial_ma_consistency(const RadialProfile& input, int n, double radius, const RunConfig& config,
                                          int resolution) {
  if (n < 1 || !(radius > 0)) throw Error(ErrorCode::InvalidArgument, "need n >= 1 and R > 0");
  const bool table = input.kind() == RadialProfile::Kind::Table;
  const RadialProfile f = table ? mollified(input) : input;
  const double width = 0.05;
  const double h0 = 2e-3 / std::ldexp(1.0, resolution);
  const double logR = std::log(radius);

  MaConsistencyReport rep;
  rep.n = n;
  rep.radius = radius;
  rep.resolution = resolution;
  rep.fd_step = h0;

  // Central differences in t = log r, exact on linear stretches of f:
  // r y' = f', r^2 y'' = f'' - f'.
  auto step = [&](double t) { return h0 * std::max(1.0, std::fabs(t) / 100.0); };
  auto ry1 = [&](double t, double h) { return (f(t + h) - f(t - h)) / (2.0 * h); };
  auto r2y2 = [&](double t, double h) { return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h) - ry1(t, h); };
  // 2^{n+1} n det(u_jk) r^{2n-1} dr with det = (y'' + y'/r)(y'/r)^{n-1} / 2^{n+1}, dr = r dt
  auto integrand = [&](double t) {
    const double h = step(t);
    const double a = ry1(t, h);
    return n * (r2y2(t, h) + a) * std::pow(a, n - 1);
  };

  const double d_coarse = ry1(logR, step(logR));
  const double d_fine = ry1(logR, 0.5 * step(logR));
  if (!std::isfinite(d_coarse) || std::fabs(d_coarse - d_fine) > 1e-2 * std::fabs(d_fine) + 1e-12)
    throw Error(ErrorCode::NumericalGradientUnstable,
                "y'(R) changes from " + std::to_string(d_coarse) + " to " + std::to_string(d_fine) +
                    " when the step is halved");
  rep.rhs = std::pow(d_coarse, n);

  double ac = 0.0;
  auto gk = [&](double a, double b, unsigned depth, double tol) {
    if (b > a) ac += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, depth, tol);
  };
  if (table) {
    // The integrand lives within 8 smoothing widths of a kink; windows are
    // merged and cut into pieces of sub * width, gaps contribute nothing.
    const double sub = 0.5 / std::ldexp(1.0, resolution);
    std::vector<std::pair<double, double>> win;
    for (double t : table_kinks(input)) {
      const double d = smoothing_width(width, t);
      if (!win.empty() && t - 8.0 * d <= win.back().second)
        win.back().second = t + 8.0 * d;
      else
        win.push_back({t - 8.0 * d, t + 8.0 * d});
    }
    for (auto [a, b] : win) {
      b = std::min(b, logR);
      if (!(b > a)) continue;
      const double d = smoothing_width(width, b);
      const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / (sub * d))));
      for (int i = 0; i < pieces; ++i) gk(a + (b - a) * i / pieces, a + (b - a) * (i + 1) / pieces, 0, 0.0);
    }
  } else {
    std::vector<double> cuts;
    for (double d = 1.0 / 16; logR - d > f.t_min(); d *= 2.0) cuts.push_back(logR - d);
    cuts.push_back(f.t_min());
    std::reverse(cuts.begin(), cuts.end());
    cuts.push_back(logR);
    const double tol = resolution == 0 ? 1e-9 : 1e-11;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) gk(cuts[i], cuts[i + 1], 10, tol);
  }
  rep.absolutely_continuous = ac;
  rep.atom = residue_mass_radial(f, n, config).value;
  rep.lhs = rep.atom + ac;
  rep.rel_gap = std::fabs(rep.lhs - rep.rhs) / std::max(std::fabs(rep.rhs), 1e-300);
  return rep;
}

// ---------------------------------------------------------------------------
// invariant report and theorem checks

std::vector<std::vector<double>> lelong_sample_points(const FunctionSpec& spec, const RunConfig& config) {
  const int n = spec.dimension();
  const auto dirs = sphere_points(2 * n, config.lelong_points, config.seed, kPointStream);
  CounterRng rng(config.seed, kPointStream + 1);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < config.lelong_points; ++i) {
    auto p = dirs[i];
    if (i % 2 == 0 && n > 1) {
      p[0] = p[1] = 0.0;
      double norm = 0.0;
      for (double v : p) norm = std::hypot(norm, v);
      for (double& v : p) v /= norm;
    }
    // radius uniform in (0.1, 0.6) R
    const double r = spec.domain_radius() * (0.1 + 0.5 * rng.uniform(i));
    for (double& v : p) v *= r;
    pts.push_back(std::move(p));
  }
  return pts;
}

bool InvariantReport::any_unstable() const {
  bool u = nu.unstable || iota_volume.unstable || nu_hat.unstable;
  if (iota_kiselman) u = u || iota_kiselman->slope.unstable;
  if (rashkovskii_lb) u = u || rashkovskii_lb->slope.unstable;
  return u;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Inapplicable: return "INAPPLICABLE";
  }
  return "?";
}

bool TheoremReport::all_pass() const {
  return std::none_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == CheckStatus::Fail; });
}

namespace {

TheoremCheck judged(TheoremCheck c, double margin, double sigma, double pass_tol) {
  c.margin = margin;
  c.tolerance = std::max(pass_tol, 3.0 * sigma);
  c.status = margin >= -c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

TheoremCheck inapplicable(TheoremCheck c, std::string why) {
  c.status = CheckStatus::Inapplicable;
  c.note = std::move(why);
  return c;
}

TheoremCheck check_lelong_sandwich(const InvariantReport& r, const RunConfig& cfg) {
  const double n = r.dimension, nu = r.nu.slope, nh = r.nu_hat.slope;
  TheoremCheck c{"lelong_sandwich", "nu <= nu_hat <= n nu", {{"nu", nu}, {"nu_hat", nh}, {"n_nu", n * nu}}};
  return judged(c, std::min(nh - nu, n * nu - nh), std::hypot(r.nu_hat.std_error, n * r.nu.std_error), cfg.pass_tol);
}

TheoremCheck check_skoda(const InvariantReport& r, const RunConfig& cfg) {
  const double n = r.dimension, nu = r.nu.slope, io = r.iota_volume.slope;
  TheoremCheck c{"skoda", "nu / n <= iota <= nu", {{"nu_over_n", nu / n}, {"iota", io}, {"nu", nu}}};
  return judged(c, std::min(io - nu / n, nu - io), std::hypot(r.iota_volume.std_error, r.nu.std_error), cfg.pass_tol);
}

TheoremCheck check_symmetrization_identity(const InvariantReport& r, const RunConfig& cfg) {
  const double n = r.dimension;
  const double a = r.iota_volume.slope, b = r.nu_hat.slope / n;
  TheoremCheck c{"symmetrization_identity", "iota = nu_hat / n", {{"iota", a}, {"nu_hat_over_n", b}}};
  return judged(c, -std::fabs(a - b), std::hypot(r.iota_volume.std_error, r.nu_hat.std_error / n), cfg.pass_tol);
}

TheoremCheck check_kiselman_identity(const InvariantReport& r, const RunConfig& cfg) {
  TheoremCheck c{"kiselman_identity", "iota = sup { nu(0, a) : a in simplex }"};
  if (!r.iota_kiselman) return inapplicable(c, r.kiselman_note);
  const double a = r.iota_kiselman->value, b = r.iota_volume.slope;
  c.values = {{"iota_kiselman", a}, {"iota_volume", b}};
  if (r.iota_kiselman->boundary) c.note = "supremum approached at the simplex boundary";
  return judged(c, -std::fabs(a - b), r.iota_kiselman->slope.std_error + r.iota_volume.std_error, cfg.pass_tol);
}

TheoremCheck check_tau_hat(const InvariantReport& r) {
  const double want = std::pow(r.nu_hat.slope, r.dimension);
  TheoremCheck c{"residue_mass_symmetrized", "tau_hat = nu_hat^n", {{"tau_hat", r.tau_hat}, {"nu_hat_pow_n", want}}};
  c.margin = -std::fabs(r.tau_hat - want);
  c.tolerance = 1e-12 * std::max(1.0, std::fabs(want));
  c.status = c.margin >= -c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

}  // namespace

InvariantReport compute_invariants(const SymmetrizationResult& result, const RunConfig& config, TauKind tau_kind,
                                   double tau) {
  const FunctionSpec& src = result.source;
  InvariantReport r;
  r.name = src.name();
  r.dimension = src.dimension();
  r.nu = lelong_origin(src, config);
  r.iota_volume = integrability_index_volume(src, config);
  r.nu_hat = lelong_symmetrized(result, config);
  r.tau_hat = std::pow(r.nu_hat.slope, r.dimension);
  r.tau_kind = tau_kind;
  if (tau_kind == TauKind::Value) r.tau = tau;
  try {
    r.iota_kiselman = integrability_index_kiselman(src, config);
  } catch (const Error& e) {
    r.kiselman_note = e.what();
  }
  try {
    r.rashkovskii_lb = rashkovskii_lower_bound(src, config);
  } catch (const Error& e) {
    r.rashkovskii_note = e.what();
  }
  auto ok = [](const TheoremCheck& c) { return c.status != CheckStatus::Fail; };
  r.bounds_ok["lelong_sandwich"] = ok(check_lelong_sandwich(r, config));
  r.bounds_ok["skoda"] = ok(check_skoda(r, config));
  r.bounds_ok["symmetrization_identity"] = ok(check_symmetrization_identity(r, config));
  r.bounds_ok["kiselman_identity"] = ok(check_kiselman_identity(r, config));
  r.bounds_ok["residue_mass_symmetrized"] = ok(check_tau_hat(r));
  return r;
}

TheoremReport verify_theorems(const InvariantReport& r, const SymmetrizationResult& result, const RunConfig& cfg) {
  TheoremReport rep;
  rep.name = r.name;
  const int n = r.dimension;
  const FunctionSpec& src = result.source;

  rep.checks.push_back(check_lelong_sandwich(r, cfg));
  rep.checks.push_back(check_skoda(r, cfg));
  rep.checks.push_back(check_symmetrization_identity(r, cfg));
  rep.checks.push_back(check_kiselman_identity(r, cfg));
  rep.checks.push_back(check_tau_hat(r));

  {
    TheoremCheck c{"radial_identity", "nu = n iota for radial u"};
    if (src.symmetry() != Symmetry::Radial) {
      rep.checks.push_back(inapplicable(c, "source is not radial"));
    } else {
      c.values = {{"nu", r.nu.slope}, {"n_iota", n * r.iota_volume.slope}};
      rep.checks.push_back(judged(c, -std::fabs(r.nu.slope - n * r.iota_volume.slope),
                                  std::hypot(r.nu.std_error, n * r.iota_volume.std_error), cfg.pass_tol));
    }
  }

  const double sigma_tau_hat = n * std::pow(r.nu_hat.slope, n - 1) * r.nu_hat.std_error;
  {
    TheoremCheck c{"mass_domination", "tau_hat <= tau"};
    c.values = {{"tau_hat", r.tau_hat}};
    switch (r.tau_kind) {
      case TauKind::Value:
        c.values.push_back({"tau", *r.tau});
        rep.checks.push_back(judged(c, *r.tau - r.tau_hat, sigma_tau_hat, cfg.pass_tol));
        break;
      case TauKind::Unbounded:
        c = judged(c, 0.0, 0.0, cfg.pass_tol);
        c.note = "tau is unbounded; holds vacuously";
        rep.checks.push_back(c);
        break;
      case TauKind::Undefined:
        rep.checks.push_back(inapplicable(c, "residue mass of u is not defined"));
        break;
      case TauKind::Unknown:
        rep.checks.push_back(inapplicable(c, "tau of u unknown"));
        break;
    }
  }

  {
    TheoremCheck c{"rashkovskii_chain", "tau_hat <= sup_a nu(0,a)^n / prod a <= tau"};
    if (!r.rashkovskii_lb) {
      rep.checks.push_back(inapplicable(c, r.rashkovskii_note));
    } else {
      const double lb = r.rashkovskii_lb->value;
      c.values = {{"tau_hat", r.tau_hat}, {"bound", lb}};
      double margin = lb - r.tau_hat;
      if (r.tau) {
        c.values.push_back({"tau", *r.tau});
        margin = std::min(margin, *r.tau - lb);
      }
      rep.checks.push_back(judged(c, margin, sigma_tau_hat, cfg.pass_tol));
    }
  }

  {
    const double io = r.iota_volume.slope;
    const double want = std::pow(n * io, n);
    TheoremCheck c{"residue_identity", "tau_hat = n^n iota^n", {{"tau_hat", r.tau_hat}, {"n_iota_pow_n", want}}};
    const double sigma = std::hypot(sigma_tau_hat, n * n * std::pow(n * io, n - 1) * r.iota_volume.std_error);
    rep.checks.push_back(judged(c, -std::fabs(r.tau_hat - want), sigma, cfg.pass_tol));
  }

  {
    TheoremCheck c{"am_gm", "n (a_1 ... a_n)^(1/n) <= a_1 + ... + a_n = 1 at the Kiselman maximizer"};
    if (!r.iota_kiselman) {
      rep.checks.push_back(inapplicable(c, r.kiselman_note));
    } else {
      double lg = 0.0;
      for (double a : r.iota_kiselman->a) lg += std::log(a);
      const double gm = n * std::exp(lg / n);
      c.values = {{"n_geometric_mean", gm}, {"sum", 1.0}};
      c.margin = 1.0 - gm;
      c.tolerance = 1e-12;
      c.status = c.margin >= -c.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
      rep.checks.push_back(c);
    }
  }

  {
    const auto pts = lelong_sample_points(src, cfg);
    rep.points.resize(pts.size());
    RunConfig inner = cfg;
    inner.workers = 1;
    parallel_for(pts.size(), cfg.workers, [&](std::size_t i) {
      rep.points[i].x = pts[i];
      rep.points[i].nu = lelong_at_point(src, pts[i], inner);
    });
    double worst = kNegInf, sigma = 0.0;
    for (const auto& p : rep.points)
      if (p.nu.slope > worst) {
        worst = p.nu.slope;
        sigma = p.nu.std_error;
      }
    TheoremCheck c{"origin_maximum", "nu(x) <= nu(0) at sampled interior points",
                   {{"max_point_nu", worst}, {"nu", r.nu.slope}}};
    rep.checks.push_back(judged(c, r.nu.slope - worst, std::hypot(sigma, r.nu.std_error), cfg.pass_tol));
  }
  return rep;
}

TheoremReport verify_theorems(const FunctionSpec& spec, const RunConfig& config, TauKind tau_kind, double tau) {
  const auto sym = schwarz_symmetrize(spec, config);
  const auto inv = compute_invariants(sym, config, tau_kind, tau);
  return verify_theorems(inv, sym, config);
}

// ---------------------------------------------------------------------------
// serialization

nlohmann::json to_json(const SimplexMaximum& m) {
  return {{"value", m.value},        {"a", m.a},       {"nu_at_a", to_json(m.slope)},
          {"boundary", m.boundary},  {"grid", m.grid}, {"evaluations", m.evaluations}};
}

nlohmann::json to_json(const MaConsistencyReport& r) {
  return {{"n", r.n},
          {"radius", r.radius},
          {"resolution", r.resolution},
          {"fd_step", r.fd_step},
          {"atom", r.atom},
          {"absolutely_continuous", r.absolutely_continuous},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"rel_gap", r.rel_gap}};
}

nlohmann::json to_json(const InvariantReport& r) {
  nlohmann::json j = {{"name", r.name},
                      {"dimension", r.dimension},
                      {"nu", to_json(r.nu)},
                      {"iota_volume", to_json(r.iota_volume)},
                      {"nu_hat", to_json(r.nu_hat)},
                      {"tau_hat", r.tau_hat},
                      {"tau_kind", to_string(r.tau_kind)},
                      {"bounds_ok", r.bounds_ok}};
  j["iota_kiselman"] = r.iota_kiselman ? to_json(*r.iota_kiselman) : nlohmann::json(nullptr);
  if (!r.kiselman_note.empty()) j["iota_kiselman_note"] = r.kiselman_note;
  j["tau"] = r.tau ? nlohmann::json(*r.tau) : nlohmann::json(nullptr);
  j["rashkovskii_lb"] = r.rashkovskii_lb ? to_json(*r.rashkovskii_lb) : nlohmann::json(nullptr);
  if (!r.rashkovskii_note.empty()) j["rashkovskii_note"] = r.rashkovskii_note;
  j["unstable"] = r.any_unstable();
  return j;
}

nlohmann::json to_json(const TheoremReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json v = nlohmann::json::object();
    for (const auto& [k, x] : c.values) v[k] = x;
    nlohmann::json cj = {{"id", c.id},         {"statement", c.statement}, {"values", v},
                         {"margin", c.margin}, {"tolerance", c.tolerance}, {"status", to_string(c.status)}};
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) pts.push_back({{"x", p.x}, {"nu", to_json(p.nu)}});
  return {{"name", r.name}, {"checks", checks}, {"points", pts}, {"all_pass", r.all_pass()}};
}

}  // namespace pshsym
