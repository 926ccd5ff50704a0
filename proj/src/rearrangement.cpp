#include "rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "error.hpp"
#include "json_util.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace pshsym {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

const char* to_string(MonotoneTable::Mode m) {
  switch (m) {
    case MonotoneTable::Mode::Step: return "STEP";
    case MonotoneTable::Mode::Linear: return "LINEAR";
    case MonotoneTable::Mode::LogLinear: return "LOG_LINEAR";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// MonotoneTable

MonotoneTable::MonotoneTable(std::vector<Knot> knots, double lower_bound, Mode mode)
    : knots_(std::move(knots)), lower_bound_(lower_bound), mode_(mode) {
  if (knots_.empty()) throw Error(ErrorCode::InvalidArgument, "monotone table needs a knot");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].log_s > knots_[i - 1].log_s))
      throw Error(ErrorCode::InvalidArgument, "table abscissae must increase strictly");
    if (knots_[i].v < knots_[i - 1].v) throw Error(ErrorCode::InvalidArgument, "table values must not decrease");
  }
  if (lower_bound_ > knots_.front().v) throw Error(ErrorCode::InvalidArgument, "lower bound above first value");
}

MonotoneTable MonotoneTable::from_profile(const VolumeProfile& profile, double log_total, double sup, Mode mode) {
  std::vector<Knot> raw;
  double lower = kNegInf;
  for (const auto& p : profile.points) {
    if (p.failed) continue;
    if (p.estimate.log_value == kNegInf) {
      lower = std::max(lower, p.t);
      continue;
    }
    raw.push_back({std::min(p.estimate.log_value, log_total), p.t, p.estimate.rel_error});
  }
  std::sort(raw.begin(), raw.end(), [](const Knot& a, const Knot& b) { return a.v < b.v; });
  std::vector<Knot> knots;
  for (const auto& k : raw) {
    if (k.v <= lower) continue;
    Knot kk = k;
    if (kk.log_s >= log_total - 1e-9) kk.log_s = log_total;
    // equal measures at several levels: keep the smallest level
    if (!knots.empty() && kk.log_s <= knots.back().log_s) continue;
    knots.push_back(kk);
  }
  if (knots.empty() || knots.back().log_s < log_total) {
    const double top = knots.empty() ? std::max(sup, lower) : std::max(sup, knots.back().v);
    knots.push_back({log_total, top, 0.0});
  }
  return MonotoneTable(std::move(knots), std::min(lower, knots.front().v), mode);
}

double MonotoneTable::first_slope() const {
  if (knots_.size() < 2) return 0.0;
  return (knots_[1].v - knots_[0].v) / (knots_[1].log_s - knots_[0].log_s);
}

double MonotoneTable::at_log(double l) const {
  const auto& k = knots_;
  if (l >= k.back().log_s) return k.back().v;
  if (l < k.front().log_s) {
    if (mode_ == Mode::Step) return k.front().v;
    const double b = first_slope();
    if (b == 0.0) return k.front().v;
    return std::max(lower_bound_, k.front().v + b * (l - k.front().log_s));
  }
  const auto it = std::upper_bound(k.begin(), k.end(), l, [](double x, const Knot& kn) { return x < kn.log_s; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  switch (mode_) {
    case Mode::Step: return hi.v;
    case Mode::Linear: {
      const double slo = std::exp(lo.log_s), shi = std::exp(hi.log_s);
      if (!(shi > slo)) return lo.v;
      return lo.v + (hi.v - lo.v) * (std::exp(l) - slo) / (shi - slo);
    }
    case Mode::LogLinear: return lo.v + (hi.v - lo.v) * (l - lo.log_s) / (hi.log_s - lo.log_s);
  }
  return hi.v;
}

double MonotoneTable::log_measure(double t) const {
  const auto& k = knots_;
  if (t <= lower_bound_) return kNegInf;
  if (t > k.back().v) return k.back().log_s;
  std::size_t i = 0;
  while (i < k.size() && k[i].v < t) ++i;
  if (mode_ == Mode::Step) return i == 0 ? kNegInf : k[i - 1].log_s;
  if (i == 0) {
    const double b = first_slope();
    if (b <= 0.0) return kNegInf;
    return k[0].log_s + (t - k[0].v) / b;
  }
  const Knot& lo = k[i - 1];
  const Knot& hi = k[i];
  const double w = (t - lo.v) / (hi.v - lo.v);
  if (mode_ == Mode::Linear) {
    const double slo = std::exp(lo.log_s), shi = std::exp(hi.log_s);
    return std::log(slo + w * (shi - slo));
  }
  return lo.log_s + w * (hi.log_s - lo.log_s);
}

namespace {

// antiderivative of e^l (v0 + b (l - l0)) in l
double lin_exp_primitive(double v0, double b, double l0, double l) {
  if (l == kNegInf) return 0.0;
  return std::exp(l) * (v0 + b * (l - l0) - b);
}

// log int_{la}^{lb} exp(kappa l + gamma) dl
double log_exp_segment(double kappa, double gamma, double la, double lb) {
  if (!(lb > la)) return kNegInf;
  if (la == kNegInf) {
    if (kappa <= 0.0) return kInf;
    return gamma + kappa * lb - std::log(kappa);
  }
  if (std::fabs(kappa) * (lb - la) < 1e-12) return gamma + kappa * la + std::log(lb - la);
  if (kappa > 0) return gamma + kappa * lb + std::log(-std::expm1(kappa * (la - lb))) - std::log(kappa);
  return gamma + kappa * la + std::log(-std::expm1(kappa * (lb - la))) - std::log(-kappa);
}

}  // namespace

double MonotoneTable::integral(double s_end) const {
  if (mode_ != Mode::LogLinear) throw Error(ErrorCode::InvalidArgument, "closed-form integrals need log-linear mode");
  if (!(s_end > 0)) return 0.0;
  const double le = std::min(std::log(s_end), log_total());
  const auto& k = knots_;
  double acc = 0.0;
  // below the first knot
  const double l0 = k[0].log_s, v0 = k[0].v, b = first_slope();
  const double top = std::min(le, l0);
  if (b <= 0.0) {
    acc += v0 * std::exp(top);
  } else {
    double lc = kNegInf;
    if (lower_bound_ > kNegInf) lc = l0 + (lower_bound_ - v0) / b;
    if (lc > kNegInf) acc += lower_bound_ * std::exp(std::min(lc, top));
    if (top > lc) acc += lin_exp_primitive(v0, b, l0, top) - lin_exp_primitive(v0, b, l0, lc);
  }
  for (std::size_t i = 0; i + 1 < k.size() && k[i].log_s < le; ++i) {
    const double la = k[i].log_s, lb = std::min(k[i + 1].log_s, le);
    const double s = (k[i + 1].v - k[i].v) / (k[i + 1].log_s - k[i].log_s);
    acc += lin_exp_primitive(k[i].v, s, la, lb) - lin_exp_primitive(k[i].v, s, la, la);
  }
  return acc;
}

double MonotoneTable::log_exp_integral(double c, double log_s_from) const {
  if (mode_ != Mode::LogLinear) throw Error(ErrorCode::InvalidArgument, "closed-form integrals need log-linear mode");
  const auto& k = knots_;
  double acc = kNegInf;
  auto add_linear = [&](double v0, double b, double l0, double la, double lb) {
    la = std::max(la, log_s_from);
    if (!(lb > la)) return;
    // exponent -2c (v0 + b (l - l0)) + l
    acc = detail::log_add_exp(acc, log_exp_segment(1.0 - 2.0 * c * b, -2.0 * c * (v0 - b * l0), la, lb));
  };
  const double l0 = k[0].log_s, v0 = k[0].v, b = first_slope();
  if (b <= 0.0) {
    add_linear(v0, 0.0, l0, kNegInf, l0);
  } else {
    double lc = kNegInf;
    if (lower_bound_ > kNegInf) {
      lc = l0 + (lower_bound_ - v0) / b;
      add_linear(lower_bound_, 0.0, lc, kNegInf, lc);
    }
    add_linear(v0, b, l0, lc, l0);
  }
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    const double s = (k[i + 1].v - k[i].v) / (k[i + 1].log_s - k[i].log_s);
    add_linear(k[i].v, s, k[i].log_s, k[i].log_s, k[i + 1].log_s);
  }
  return acc;
}

std::vector<std::pair<double, double>> MonotoneTable::breakpoints() const {
  std::vector<std::pair<double, double>> out;
  out.emplace_back(0.0, lower_bound_);
  for (const auto& k : knots_) out.emplace_back(std::exp(k.log_s), k.v);
  return out;
}

// ---------------------------------------------------------------------------
// rearrangement

std::vector<double> default_t_grid(const RunConfig& cfg, double top) {
  std::vector<double> g;
  const double depth = std::min(cfg.grid_near_depth, -cfg.t_min);
  const int steps = static_cast<int>(std::floor(depth / cfg.grid_near_step + 1e-9));
  for (int k = 0; k <= steps; ++k) g.push_back(top - k * cfg.grid_near_step);
  // u_* behaves like -sqrt(|Omega| - s) when the supremum is a critical value;
  // geometric levels keep the relative interpolation error flat there
  const double span = std::min(8 * cfg.grid_near_step, depth);
  for (int j = 1; j <= 36; ++j) g.push_back(top - span * std::exp2(-0.25 * j));
  const double last = steps * cfg.grid_near_step;
  if (-cfg.t_min > last && cfg.grid_deep_points > 1) {
    const double ratio = -cfg.t_min / last;
    for (int i = 1; i < cfg.grid_deep_points; ++i)
      g.push_back(top - last * std::pow(ratio, static_cast<double>(i) / (cfg.grid_deep_points - 1)));
  }
  std::sort(g.begin(), g.end(), std::greater<>());
  g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::fabs(a - b) < 1e-12; }), g.end());
  return g;
}

Rearrangement increasing_rearrangement(const FunctionSpec& spec, std::span<const double> t_grid,
                                       const RunConfig& config) {
  Rearrangement out;
  out.volumes = volume_profile(spec, t_grid, config);
  const double log_total = std::log(domain_volume(spec));
  const double sup = spec.boundary_sup();
  auto& pts = out.volumes.points;

  std::set<std::pair<double, double>> verified;
  for (int pass = 0;; ++pass) {
    out.table = MonotoneTable::from_profile(out.volumes, log_total, sup);
    std::vector<std::size_t> gaps;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const auto& a = pts[i];
      const auto& b = pts[i + 1];
      if (a.failed || b.failed || a.t - b.t <= config.grid_max_jump) continue;
      if (b.estimate.log_value == kNegInf || !(a.estimate.log_value > b.estimate.log_value)) continue;
      if (verified.count({a.t, b.t})) continue;
      gaps.push_back(i);
    }
    if (gaps.empty()) break;
    out.refinement_probes += static_cast<int>(gaps.size());
    if (out.refinement_probes > 4000)
      throw Error(ErrorCode::GridTooCoarse, "inversion still misses after " + std::to_string(out.refinement_probes) +
                                                " refinement probes near t = " + std::to_string(pts[gaps[0]].t));
    std::vector<ProfilePoint> probes(gaps.size());
    parallel_for(gaps.size(), config.workers, [&](std::size_t j) {
      const double tm = 0.5 * (pts[gaps[j]].t + pts[gaps[j] + 1].t);
      probes[j].t = tm;
      RunConfig inner = config;
      inner.workers = 1;
      try {
        probes[j].estimate = sublevel_volume(spec, tm, inner);
      } catch (const Error& e) {
        probes[j].failed = true;
        probes[j].error = e.what();
      }
    });
    std::vector<ProfilePoint> added;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
      const auto& pr = probes[j];
      const std::pair<double, double> key{pts[gaps[j]].t, pts[gaps[j] + 1].t};
      if (pr.failed || pr.estimate.log_value == kNegInf) {
        verified.insert(key);
        continue;
      }
      const double err = std::fabs(out.table.at_log(pr.estimate.log_value) - pr.t);
      if (err > config.grid_probe_tol * (1.0 + std::fabs(pr.t))) {
        added.push_back(pr);
      } else {
        verified.insert(key);
      }
    }
    if (added.empty()) break;
    out.refined_levels += static_cast<int>(added.size());
    pts.insert(pts.end(), added.begin(), added.end());
    std::sort(pts.begin(), pts.end(), [](const ProfilePoint& a, const ProfilePoint& b) { return a.t > b.t; });
    enforce_monotone(out.volumes);
  }
  out.t_grid.clear();
  for (const auto& p : pts) out.t_grid.push_back(p.t);
  return out;
}

ConvexityReport check_profile_convexity(std::span<const Knot> k, std::span<const double> unc, double tol) {
  ConvexityReport r;
  double worst_score = kNegInf;
  // strided triples: noise in the knots hides curvature between neighbours
  // but not across wider spans, where the excess grows with the stride squared
  for (std::size_t m = 1; 2 * m < k.size(); m *= 2)
  for (std::size_t i = 0; i + 2 * m < k.size(); ++i) {
    const std::size_t a = i, b = i + m, c = i + 2 * m;
    const double t1 = k[a].t, t2 = k[b].t, t3 = k[c].t;
    const double f1 = k[a].f, f2 = k[b].f, f3 = k[c].f;
    const double s12 = (f2 - f1) / (t2 - t1), s23 = (f3 - f2) / (t3 - t2);
    const double chord = f1 + (f3 - f1) * (t2 - t1) / (t3 - t1);
    const double excess = f2 - chord;
    const double u = unc.empty() ? 0.0 : unc[a] + unc[b] + unc[c];
    const double allowed = tol * (1.0 + std::fabs(f2)) + 2.0 * std::max(std::fabs(s12), std::fabs(s23)) * u;
    r.worst_excess = std::max(r.worst_excess, excess);
    if (excess - allowed > worst_score) {
      worst_score = excess - allowed;
      r.worst_tolerance = allowed;
      r.witness_t = {t1, t2, t3};
      r.witness_f = {f1, f2, f3};
    }
  }
  // decreasing knots are a violation of the same kind
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    const double drop = k[i].f - k[i + 1].f;
    if (drop > tol * (1.0 + std::fabs(k[i].f)) && drop - tol > worst_score) {
      worst_score = drop - tol;
      r.witness_t = {k[i].t, k[i + 1].t, k[i + 1].t};
      r.witness_f = {k[i].f, k[i + 1].f, k[i + 1].f};
    }
  }
  r.ok = worst_score <= 0.0;
  return r;
}

SymmetrizationResult schwarz_symmetrize(const FunctionSpec& spec, std::span<const double> t_grid,
                                        const RunConfig& config) {
  SymmetrizationResult res{spec.normalized(), {}, {}, {}};
  res.rearrangement = increasing_rearrangement(res.source, t_grid, config);
  const auto& table = res.rearrangement.table;
  const int N = 2 * spec.dimension();
  const double la = log_ball_coefficient(N);
  std::vector<Knot> knots;
  std::vector<double> unc;
  for (const auto& k : table.knots()) {
    knots.push_back({(k.log_s - la) / N, k.v});
    unc.push_back(k.rel_err / N);
  }
  knots.back().t = std::log(spec.domain_radius());
  if (knots.size() > 1 && !(knots.back().t > knots[knots.size() - 2].t)) knots.erase(knots.end() - 2);
  res.convexity = check_profile_convexity(knots, unc, config.convexity_tol);
  if (!res.convexity.ok) {
    std::ostringstream os;
    os.precision(10);
    const auto& c = res.convexity;
    os << "symmetrized profile of " << spec.name() << " is not convex: witness t = (" << c.witness_t[0] << ", "
       << c.witness_t[1] << ", " << c.witness_t[2] << "), f = (" << c.witness_f[0] << ", " << c.witness_f[1] << ", "
       << c.witness_f[2] << "), excess " << c.worst_excess << " over tolerance " << c.worst_tolerance;
    throw Error(ErrorCode::ConvexityViolation, os.str());
  }
  const PoleStructure poles =
      table.lower_bound() == kNegInf ? PoleStructure::SinglePoleAtOrigin : PoleStructure::NoPole;
  res.u_hat = FunctionSpec::make(spec.name() + "-hat", spec.dimension(), Symmetry::Radial,
                                 RadialProfile::table(std::move(knots), table.lower_bound()), spec.domain_radius(),
                                 spec.extension_margin(), poles);
  res.u_hat.set_raw_sup(table.sup());
  return res;
}

SymmetrizationResult schwarz_symmetrize(const FunctionSpec& spec, const RunConfig& config) {
  const auto grid = default_t_grid(config);
  return schwarz_symmetrize(spec, grid, config);
}

// ---------------------------------------------------------------------------
// checks

std::vector<double> default_probe_levels(const SymmetrizationResult& result, int count) {
  std::vector<double> t;
  const auto& tab = result.u_star();
  for (int k = 0; k < count; ++k) {
    const double q = 0.9 * std::pow(10.0, -6.0 * k / std::max(1, count - 1));
    t.push_back(tab.at_log(std::log(q) + tab.log_total()));
  }
  return t;
}

EquimeasurabilityReport equimeasurability_check(const SymmetrizationResult& result, std::span<const double> t_probe,
                                                const RunConfig& config) {
  EquimeasurabilityReport rep;
  rep.probes.resize(t_probe.size());
  RunConfig inner = config;
  inner.workers = 1;
  parallel_for(t_probe.size(), config.workers, [&](std::size_t i) {
    auto& p = rep.probes[i];
    p.t = t_probe[i];
    p.log_mu_u = sublevel_volume(result.source, p.t, inner).log_value;
    p.log_mu_u_star = result.u_star().log_measure(p.t);
    p.log_mu_u_hat = sublevel_volume(result.u_hat, p.t, inner).log_value;
    const double hi = std::max({p.log_mu_u, p.log_mu_u_star, p.log_mu_u_hat});
    const double lo = std::min({p.log_mu_u, p.log_mu_u_star, p.log_mu_u_hat});
    p.rel_discrepancy = hi == kNegInf ? 0.0 : (lo == kNegInf ? 1.0 : -std::expm1(lo - hi));
  });
  for (const auto& p : rep.probes) rep.max_rel_discrepancy = std::max(rep.max_rel_discrepancy, p.rel_discrepancy);
  return rep;
}

namespace {

// uniform samples in B_r(center); returns mean of h(u) and its standard error
std::pair<double, double> mc_ball_mean(const FunctionSpec& spec, std::span<const double> center, double radius,
                                       const std::function<double(double)>& h, const RunConfig& config,
                                       std::uint64_t stream) {
  const int N = 2 * spec.dimension();
  const std::int64_t total = config.mc_samples;
  const int blocks = 64;
  std::vector<double> sum(blocks), sum2(blocks);
  parallel_for(blocks, config.workers, [&](std::size_t b) {
    CounterRng rng(config.seed, stream + b);
    std::vector<double> z(N);
    const std::int64_t lo = total * b / blocks, hi = total * (b + 1) / blocks;
    for (std::int64_t i = lo; i < hi; ++i) {
      const std::uint64_t base = static_cast<std::uint64_t>(i - lo) * (N + 1);
      double norm = 0.0;
      for (int c = 0; c < N; ++c) {
        z[c] = rng.normal(base + c);
        norm = std::hypot(norm, z[c]);
      }
      const double r = radius * std::pow(rng.uniform(2 * (base + N)), 1.0 / N);
      for (int c = 0; c < N; ++c) z[c] = center[c] + z[c] * r / norm;
      const double v = h(spec.value(z));
      sum[b] += v;
      sum2[b] += v * v;
    }
  });
  double s = 0.0, s2 = 0.0;
  for (int b = 0; b < blocks; ++b) s += sum[b], s2 += sum2[b];
  const double mean = s / total;
  const double var = std::max(0.0, s2 / total - mean * mean);
  return {mean, std::sqrt(var / total)};
}

}  // namespace

LayerCakeReport layer_cake_check(const SymmetrizationResult& result, double c, const RunConfig& config,
                                 std::vector<double> cuts) {
  if (c < 0) throw Error(ErrorCode::InvalidArgument, "layer-cake exponent c must be >= 0");
  LayerCakeReport rep;
  rep.c = c;
  const auto& src = result.source;
  const double R = src.domain_radius();
  std::sort(cuts.begin(), cuts.end(), std::greater<>());
  std::vector<double> prev_l, prev_r;
  for (double cut : cuts) {
    double log_lhs;
    if (src.symmetry() == Symmetry::S1Invariant) {
      auto h = [&](double u) { return u >= cut ? std::exp(-2.0 * c * u) : 0.0; };
      std::vector<double> origin(2 * src.dimension(), 0.0);
      const auto [mean, se] = mc_ball_mean(src, origin, R, h, config, 0x1C00);
      log_lhs = std::log(mean * domain_volume(src));
    } else {
      LogIntegrand psi = [c](std::span<const double>, double g) { return -2.0 * c * g; };
      log_lhs = toric_level_integral(src, cut, kInf, R, psi, config.quad_rel_tol).log_value;
    }
    const double log_rhs = result.u_star().log_exp_integral(c, result.u_star().log_measure(cut));
    LayerCakeCut lc;
    lc.t_cut = cut;
    lc.lhs = std::exp(std::min(log_lhs, 690.0));
    lc.rhs = std::exp(std::min(log_rhs, 690.0));
    lc.rel_gap = std::fabs(std::expm1(log_lhs - log_rhs));
    if (log_lhs == kNegInf && log_rhs == kNegInf) lc.rel_gap = 0.0;
    rep.cuts.push_back(lc);
  }
  if (!rep.cuts.empty()) {
    const auto& last = rep.cuts.back();
    rep.rel_gap = last.rel_gap;
    rep.divergent = last.lhs > rep.sentinel && last.rhs > rep.sentinel;
    if (rep.cuts.size() >= 2 && !rep.divergent) {
      const auto& before = rep.cuts[rep.cuts.size() - 2];
      rep.finite = std::fabs(last.lhs - before.lhs) <= 1e-2 * last.lhs &&
                   std::fabs(last.rhs - before.rhs) <= 1e-2 * last.rhs;
    }
  }
  return rep;
}

SublevelIntegralReport sublevel_integral_check(const SymmetrizationResult& result, std::span<const double> center,
                                               double radius, const RunConfig& config) {
  const auto& src = result.source;
  const int n = src.dimension();
  if (center.size() != static_cast<std::size_t>(2 * n))
    throw Error(ErrorCode::InvalidArgument, "ball center has the wrong number of coordinates");
  double cn = 0.0;
  for (double c : center) cn = std::hypot(cn, c);
  if (!(radius > 0) || cn + radius > src.domain_radius() * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "probe ball must lie inside the domain");
  SublevelIntegralReport rep;
  rep.center.assign(center.begin(), center.end());
  rep.radius = radius;
  rep.centered = cn == 0.0;
  rep.ball_volume = ball_coefficient(2 * n) * std::pow(radius, 2 * n);
  rep.rhs = result.u_star().integral(rep.ball_volume);

  if (rep.centered && src.symmetry() != Symmetry::S1Invariant) {
    // int u = M |E| - int (M - u) with M >= u on the ball
    std::vector<double> corner(n, std::log(radius));
    const double M = src.toric(corner);
    LogIntegrand psi = [M](std::span<const double>, double g) {
      const double d = M - g;
      return d > 0 ? std::log(d) : kNegInf;
    };
    // radial inputs are checked for equality, which needs the tighter target
    const double tol = src.symmetry() == Symmetry::Radial ? std::min(config.quad_rel_tol, 1e-11) : config.quad_rel_tol;
    const auto I = toric_level_integral(src, kNegInf, kInf, radius, psi, tol);
    const double deficit = std::exp(I.log_value);
    rep.lhs = M * rep.ball_volume - deficit;
    rep.lhs_error = deficit * I.rel_error + 1e-14 * std::fabs(M * rep.ball_volume);
    rep.u_hat_integral = rep.rhs;
    rep.method = "QUADRATURE";
  } else {
    auto h = [](double u) { return u; };
    const auto [mean, se] = mc_ball_mean(src, center, radius, h, config, 0x5B00);
    rep.lhs = mean * rep.ball_volume;
    rep.lhs_error = 3.0 * se * rep.ball_volume;
    rep.method = "MONTE_CARLO";
    if (rep.centered) rep.u_hat_integral = rep.rhs;
  }
  rep.gap = rep.lhs - rep.rhs;
  rep.holds = rep.gap >= -(rep.lhs_error + 1e-9 * std::fabs(rep.rhs));
  return rep;
}

PolyaSzegoReport polya_szego_check(const SymmetrizationResult& result, double rho, double p,
                                   const RunConfig& config, double upper_fraction) {
  if (!(p >= 1)) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
  const auto& src = result.source;
  if (src.symmetry() == Symmetry::S1Invariant)
    throw Error(ErrorCode::SymmetryRequired, "energy quadrature needs a toric or radial spec");
  const double R = src.domain_radius();
  const double upper = upper_fraction * R;
  if (!(rho > 0 && rho < upper && upper <= R))
    throw Error(ErrorCode::InvalidArgument, "cutoff radii must satisfy 0 < rho < upper_fraction R <= R");
  const int n = src.dimension();
  PolyaSzegoReport rep;
  rep.p = p;
  rep.rho = rho;
  rep.upper_radius = upper;
  rep.level = result.profile()(std::log(rho));
  rep.upper_level = result.profile()(std::log(upper));

  // symmetrized side from the piecewise-linear profile
  {
    const auto& k = result.profile().knots();
    const double a = ball_coefficient(2 * n);
    const double lo = std::log(rho), hi = std::log(upper);
    const double kappa = 2.0 * n - p;
    double e = 0.0;
    auto add = [&](double slope, double ta, double tb) {
      ta = std::max(ta, lo);
      tb = std::min(tb, hi);
      if (!(tb > ta)) return;
      const double w = std::fabs(kappa) < 1e-15 ? tb - ta : (std::exp(kappa * tb) - std::exp(kappa * ta)) / kappa;
      e += std::pow(std::fabs(slope), p) * w;
    };
    if (k.size() >= 2) {
      add(result.profile().tail_slope(), kNegInf, k[0].t);
      for (std::size_t i = 0; i + 1 < k.size(); ++i)
        add((k[i + 1].f - k[i].f) / (k[i + 1].t - k[i].t), k[i].t, k[i + 1].t);
    }
    rep.energy_u_hat = 2.0 * n * a * e;
  }

  // original side: |grad u|^2 = sum_k (dg/dx_k)^2 e^{-2 x_k}
  const double h = 1e-3;
  auto energy = [&](bool richardson) {
    std::vector<double> y(n);
    LogIntegrand psi = [&, richardson](std::span<const double> x, double) {
      std::copy(x.begin(), x.end(), y.begin());
      double acc = kNegInf;
      for (int k = 0; k < n; ++k) {
        if (x[k] == kNegInf) continue;
        auto diff = [&](double step) {
          y[k] = x[k] + step;
          const double up = src.toric(y);
          y[k] = x[k] - step;
          const double dn = src.toric(y);
          y[k] = x[k];
          return (up - dn) / (2.0 * step);
        };
        double d = diff(h);
        if (richardson) d = (4.0 * diff(0.5 * h) - d) / 3.0;
        if (!std::isfinite(d) || d == 0.0) continue;
        acc = detail::log_add_exp(acc, 2.0 * std::log(std::fabs(d)) - 2.0 * x[k]);
      }
      return acc == kNegInf ? kNegInf : 0.5 * p * acc;
    };
    // an inequality with a visible margin; 1e-5 keeps kinked profiles cheap
    return toric_level_integral(src, rep.level, rep.upper_level, R, psi, std::max(config.quad_rel_tol, 1e-5));
  };
  const double coarse = std::exp(energy(false).log_value);
  const double fine = std::exp(energy(true).log_value);
  rep.energy_u = fine;
  rep.richardson_disagreement = fine > 0 ? std::fabs(coarse - fine) / fine : 0.0;
  if (rep.richardson_disagreement > 0.05)
    throw Error(ErrorCode::NumericalGradientUnstable,
                "finite-difference energies disagree by " + std::to_string(100 * rep.richardson_disagreement) + "%");
  rep.margin = rep.energy_u - rep.energy_u_hat;
  rep.holds = rep.margin >= -1e-4 * std::max(rep.energy_u, rep.energy_u_hat);
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const MonotoneTable& table) {
  nlohmann::json bp = nlohmann::json::array();
  nlohmann::json logs = nlohmann::json::array();
  bp.push_back({0.0, json_number(table.lower_bound())});
  logs.push_back("-inf");
  for (const auto& k : table.knots()) {
    bp.push_back({std::exp(k.log_s), json_number(k.v)});
    logs.push_back(json_number(k.log_s));
  }
  return {{"mode", to_string(table.mode())},
          {"lower_bound", json_number(table.lower_bound())},
          {"breakpoints", bp},
          {"log_s", logs}};
}

nlohmann::json to_json(const SymmetrizationResult& r) {
  nlohmann::json knots = nlohmann::json::array();
  for (const auto& k : r.profile().knots()) knots.push_back({json_number(k.t), json_number(k.f)});
  const auto& c = r.convexity;
  return {{"source_name", r.source.name()},
          {"t_grid", json_array(r.rearrangement.t_grid)},
          {"refinement_probes", r.rearrangement.refinement_probes},
          {"refined_levels", r.rearrangement.refined_levels},
          {"monotone_adjustments", r.rearrangement.volumes.adjusted_points},
          {"u_star_breakpoints", to_json(r.u_star())},
          {"u_hat_profile_knots", knots},
          {"checks",
           {{"convexity",
             {{"ok", c.ok},
              {"worst_excess", c.worst_excess},
              {"tolerance", c.worst_tolerance}}}}}};
}

}  // namespace pshsym
