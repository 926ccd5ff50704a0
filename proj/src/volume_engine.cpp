#include "volume_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "error.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace pshsym {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * std::numbers::pi);
}  // namespace

const char* to_string(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::RadialExact: return "RADIAL_EXACT";
    case VolumeMethod::ToricQuadrature: return "TORIC_QUADRATURE";
    case VolumeMethod::MonteCarlo: return "MONTE_CARLO";
  }
  return "?";
}

double log_ball_coefficient(int N) {
  return 0.5 * N * std::log(std::numbers::pi) - std::lgamma(0.5 * N + 1.0);
}

double ball_coefficient(int N) {
  // exact forms for the small cases so a_2 and a_4 carry no lgamma rounding
  if (N % 2 == 0) {
    double v = 1.0;
    for (int k = 1; k <= N / 2; ++k) v *= std::numbers::pi / k;
    return v;
  }
  return std::exp(log_ball_coefficient(N));
}

double domain_volume(const FunctionSpec& spec) {
  const int N = 2 * spec.dimension();
  return ball_coefficient(N) * std::pow(spec.domain_radius(), N);
}

namespace {

struct Bracket {
  double lo, hi;
};

/// For nondecreasing h on [x_lo, x_hi] returns the bracket around the point s
/// with h < level on [x_lo, s) and h >= level on [s, x_hi]. x_lo may be -inf.
template <class H>
Bracket crossing(H&& h, double level, double x_lo, double x_hi) {
  if (level == kNegInf) return {x_lo, x_lo};
  if (level == kInf) return {x_hi, x_hi};
  if (h(x_hi) < level) return {x_hi, x_hi};
  if (h(x_lo) >= level) return {x_lo, x_lo};
  double b = x_hi;
  double a = x_lo;
  if (x_lo == kNegInf) {
    double w = 1.0;
    a = x_hi - w;
    int guard = 0;
    while (!(h(a) < level)) {
      b = a;
      w *= 2.0;
      a = x_hi - w;
      if (++guard > 1100) return {x_lo, x_lo};
    }
  }
  auto phi = [&](double x) {
    const double v = h(x) - level;
    if (std::isnan(v)) throw Error(ErrorCode::ToleranceNotMet, "profile is NaN at x = " + std::to_string(x));
    if (v >= 0.0) return std::clamp(v, 1e-300, 1e100);
    return std::max(v, -1e100);
  };
  const double fa = phi(a), fb = phi(b);
  std::uintmax_t iters = 200;
  auto tol = [](double p, double q) { return std::fabs(p - q) <= 4e-15 * std::max({1.0, std::fabs(p), std::fabs(q)}); };
  const auto r = boost::math::tools::toms748_solve(phi, a, b, fa, fb, tol, iters);
  return {r.first, r.second};
}

double mid(const Bracket& b) { return b.lo == b.hi ? b.lo : 0.5 * (b.lo + b.hi); }

struct Rescale {
  double scale;
};

/// Integrates exp(F(x)) over [D, U] (D may be -inf) on segments of doubling
/// width stacked downward from U. Returns log of the integral and the
/// relative error estimate.
class SegmentedIntegrator {
 public:
  double rel_tol;
  // log upper bound for the integral over (-inf, a]; null means heuristic tail
  std::function<double(double)> tail_bound;
  // grade the mesh geometrically toward finite endpoints, where an inner
  // slice can collapse inside a layer far thinner than any GK node spacing
  bool grade_top = false;
  bool grade_bottom = false;

  template <class F>
  std::pair<double, double> integrate(F&& logf, double D, double U, double prior = kNegInf) const {
    double total = kNegInf, total_err = kNegInf;
    if (!(U > D)) return {kNegInf, 0.0};
    double top = U;
    double width = 0.5;
    int small = 0;
    for (int seg = 0; seg < 20000; ++seg) {
      const double a = std::max(D, top - width);
      const double b = top;
      const bool at_top = seg == 0 && grade_top, at_bottom = a == D && grade_bottom && D > kNegInf;
      const double seen = detail::log_add_exp(prior, total);
      auto [lv, le] = (at_top || at_bottom) ? graded_segment(logf, a, b, at_top, at_bottom, seen)
                                            : segment(logf, a, b, seen);
      total_err = detail::log_add_exp(total_err, le);
      const double before = total;
      total = detail::log_add_exp(total, lv);
      if (a == D) return finish(total, total_err);
      const double thresh = detail::log_add_exp(prior, total) + std::log(0.1 * rel_tol);
      if (tail_bound) {
        const double tail = tail_bound(a);
        if (total > kNegInf && tail < thresh) return finish(total, detail::log_add_exp(total_err, tail));
      } else {
        const bool negligible = (lv == kNegInf && before == kNegInf) || lv < thresh;
        small = negligible ? small + 1 : 0;
        if (small >= 2 && width >= 8.0) return finish(total, detail::log_add_exp(total_err, lv));
      }
      top = a;
      width = std::min(2.0 * width, 100.0);
    }
    throw Error(ErrorCode::ToleranceNotMet, "integral tail did not settle within the segment budget");
  }

 private:
  static std::pair<double, double> finish(double total, double err) {
    if (total == kNegInf) return {kNegInf, 0.0};
    return {total, std::exp(err - total)};
  }

  template <class F>
  std::pair<double, double> graded_segment(F&& logf, double a, double b, bool top, bool bottom, double total) const {
    std::vector<double> cuts{a, b};
    const double w = b - a;
    for (int k = 1; k <= 24; ++k) {
      const double d = w * std::pow(0.25, k);
      if (d < 1e-12 * (1.0 + std::fabs(top ? b : a))) break;
      if (top) cuts.push_back(b - d);
      if (bottom) cuts.push_back(a + d);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double lv = kNegInf, le = kNegInf;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i + 1] > cuts[i])) continue;
      auto [v, e] = segment(logf, cuts[i], cuts[i + 1], detail::log_add_exp(total, lv), true);
      lv = detail::log_add_exp(lv, v);
      le = detail::log_add_exp(le, e);
    }
    return {lv, le};
  }

  // GK15 alone can miss a kink sitting between its outermost nodes, so each
  // interval's error is also checked against the sum of its two halves.
  // Intervals are split worst first until the total error meets the target
  // or the budget runs out (noisy integrands never settle).
  template <class F>
  static double adaptive(F& f, double a, double b, double tol, double* err) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Piece {
      double a, b, value, err, left, right, el, er;
      bool operator<(const Piece& o) const { return err < o.err; }
    };
    auto make = [&](double lo, double hi, double whole) {
      const double m = 0.5 * (lo + hi);
      double el = 0.0, er = 0.0;
      const double L = GK::integrate(f, lo, m, 0, 0.0, &el);
      const double R = GK::integrate(f, m, hi, 0, 0.0, &er);
      return Piece{lo, hi, L + R, std::max(std::fabs(L + R - whole), el + er), L, R, el, er};
    };
    const double whole = GK::integrate(f, a, b, 0, 0.0, nullptr);
    std::vector<Piece> heap{make(a, b, whole)};
    double value = heap.front().value, total_err = heap.front().err;
    std::vector<Piece> done;
    double checkpoint = total_err;
    for (int it = 1; it <= 400; ++it) {
      if (total_err <= tol * std::fabs(value) || heap.empty()) break;
      if (it % 50 == 0) {
        if (total_err > 0.7 * checkpoint) break;
        checkpoint = total_err;
      }
      std::pop_heap(heap.begin(), heap.end());
      const Piece p = heap.back();
      heap.pop_back();
      const double span = std::max(std::fabs(p.a), std::fabs(p.b)) * std::numeric_limits<double>::epsilon();
      if (p.b - p.a <= 256.0 * span) {
        done.push_back(p);
        continue;
      }
      const double m = 0.5 * (p.a + p.b);
      Piece l = make(p.a, m, p.left), r = make(m, p.b, p.right);
      value += l.value + r.value - p.value;
      total_err += l.err + r.err - p.err;
      heap.push_back(l);
      std::push_heap(heap.begin(), heap.end());
      heap.push_back(r);
      std::push_heap(heap.begin(), heap.end());
    }
    // re-add from scratch to shed the drift of the running sums
    value = 0.0;
    total_err = 0.0;
    for (const auto* set : {&heap, &done})
      for (const auto& p : *set) {
        value += p.value;
        total_err += p.err;
      }
    *err = total_err;
    return value;
  }

  // The accuracy target is relative to the running total, so segments far
  // below it are not refined to their own relative precision.
  template <class F>
  std::pair<double, double> segment(F&& logf, double a, double b, double total, bool cheap = false) const {
    double S = kNegInf, mean = kNegInf;
    for (int k = 0; k <= 4; ++k) {
      const double l = logf(a + (b - a) * k / 4.0);
      S = std::max(S, l);
      mean = detail::log_add_exp(mean, l + std::log((k == 0 || k == 4) ? 0.125 : 0.25));
    }
    if (S == kNegInf) {
      for (int k = 0; k <= 32; ++k) S = std::max(S, logf(a + (b - a) * (k + 0.5) / 33.0));
      if (S == kNegInf) return {kNegInf, kNegInf};
    }
    const double rough = S + std::log(b - a);
    // a graded piece this far below the total is not worth refining
    if (cheap && total > kNegInf && rough < total + std::log(1e-3 * rel_tol))
      return {mean + std::log(b - a), rough};
    const double tol = std::min(0.1, 0.1 * rel_tol * std::exp(std::clamp(total - rough, 0.0, 600.0)));
    for (int attempt = 0; attempt < 8; ++attempt) {
      try {
        const double scale = S;
        auto f = [&](double x) {
          const double l = logf(x);
          if (l - scale > 300.0) throw Rescale{l};
          return l == kNegInf ? 0.0 : std::exp(l - scale);
        };
        double err = 0.0;
        const double I = adaptive(f, a, b, tol, &err);
        if (!(I > 0.0)) return {kNegInf, kNegInf};
        return {std::log(I) + S, std::log(std::max(err, 1e-17 * I)) + S};
      } catch (const Rescale& r) {
        S = r.scale;
      }
    }
    throw Error(ErrorCode::ToleranceNotMet, "integrand scale did not stabilise");
  }
};

class ToricIntegrator {
 public:
  ToricIntegrator(const FunctionSpec& spec, double lo, double hi, double radius, const LogIntegrand* psi,
                  double rel_tol)
      : spec_(spec), n_(spec.dimension()), lo_(lo), hi_(hi), log_r_(std::log(radius)), psi_(psi),
        rel_tol_(rel_tol), x_(spec.dimension(), kNegInf) {}

  LevelIntegral run() {
    LevelIntegral out;
    const double v = level(0);
    out.log_value = v == kNegInf ? kNegInf : v + n_ * kLog2Pi;
    out.rel_error = max_rel_;
    out.nodes = nodes_;
    return out;
  }

 private:
  double g() {
    ++nodes_;
    return spec_.toric(x_);
  }

  // inner integrals run tighter so the outer error estimate sees a smooth integrand
  double tol(int j) const { return rel_tol_ * std::pow(0.03, j); }

  // log of the remaining radius once coordinates 0..j-1 are fixed
  double cap(int j) const {
    if (j == 1) {
      // 1 - e^{2y} via expm1 keeps the cap accurate as y approaches 0
      const double y = x_[0] - log_r_;
      if (y >= 0.0) return kNegInf;
      return log_r_ + 0.5 * std::log(-std::expm1(2.0 * y));
    }
    double used = 0.0;
    for (int k = 0; k < j; ++k) used += std::exp(2.0 * (x_[k] - log_r_));
    if (used >= 1.0) return kNegInf;
    return log_r_ + 0.5 * std::log1p(-used);
  }

  double level(int j) {
    const double c = cap(j);
    if (c == kNegInf) return kNegInf;
    for (int k = j; k < n_; ++k) x_[k] = kNegInf;
    if (j == n_ - 1) return last(c);

    auto h_low = [&](double x) {
      x_[j] = x;
      for (int k = j + 1; k < n_; ++k) x_[k] = kNegInf;
      return g();
    };
    const double U = mid(crossing(h_low, hi_, kNegInf, c));
    double D = kNegInf;
    if (lo_ > kNegInf) {
      auto h_high = [&](double x) {
        x_[j] = x;
        for (int k = j + 1; k < n_; ++k) x_[k] = c;
        return g();
      };
      D = mid(crossing(h_high, lo_, kNegInf, c));
    }
    if (!(U > D)) return kNegInf;
    auto F = [&](double x) {
      x_[j] = x;
      const double inner = level(j + 1);
      return inner == kNegInf ? kNegInf : 2.0 * x + inner;
    };
    // pieces between kinks of the inner bounds, integrated top down
    std::vector<double> cuts{U};
    if (j == n_ - 2) {
      auto sw = regime_switches(j, D, U);
      cuts.insert(cuts.end(), sw.rbegin(), sw.rend());
    }
    cuts.push_back(D);
    double total = kNegInf, abs_err = kNegInf;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double b = cuts[i], a = cuts[i + 1];
      SegmentedIntegrator integ{tol(j), nullptr, i == 0, a == D};
      if (!psi_ && a == kNegInf) {
        const int m = n_ - 1 - j;
        const double inner = m * (2.0 * log_r_ - std::log(2.0));
        integ.tail_bound = [inner](double z) { return 2.0 * z - std::log(2.0) + inner; };
      }
      auto [v, rel] = integ.integrate(F, a, b, total);
      if (v > kNegInf) abs_err = detail::log_add_exp(abs_err, v + std::log(std::max(rel, 1e-300)));
      total = detail::log_add_exp(total, v);
    }
    if (total > kNegInf) max_rel_ = std::max(max_rel_, std::exp(abs_err - total));
    return total;
  }

  // Which of the last coordinate's bounds bind, with x_[0..n-2] fixed. The
  // outer integrand has a kink wherever this changes.
  int regime() {
    const int j = n_ - 1;
    const double c = cap(j);
    if (c == kNegInf) return 16;
    x_[j] = c;
    const double top = g();
    x_[j] = kNegInf;
    const double bottom = g();
    return int(top < hi_) | int(top < lo_) << 1 | int(bottom >= lo_) << 2 | int(bottom >= hi_) << 3;
  }

  std::vector<double> regime_switches(int j, double D, double U) {
    auto at = [&](double x) {
      x_[j] = x;
      return regime();
    };
    auto finite = [](double v) { return std::isfinite(v) ? std::fabs(v) : 0.0; };
    double reach = 50.0 + 4.0 * std::max(finite(hi_), finite(lo_));
    if (D > kNegInf) reach = std::min(reach, U - D);
    std::vector<double> xs;
    for (double d = 1e-13 * (1.0 + std::fabs(U)); d < reach; d *= 1.15) xs.push_back(U - d);
    xs.push_back(U - reach);
    std::vector<double> out;
    double prev_x = xs.front();
    int prev = at(prev_x);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const int r = at(xs[i]);
      if (r != prev) {
        double hi = prev_x, lo = xs[i];
        for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::fabs(lo)); ++it) {
          const double m = 0.5 * (lo + hi);
          (at(m) == prev ? hi : lo) = m;
        }
        const double cut = 0.5 * (lo + hi);
        if (cut > D && cut < U) out.push_back(cut);
      }
      prev = r;
      prev_x = xs[i];
    }
    std::sort(out.begin(), out.end());
    for (int k = j; k < n_; ++k) x_[k] = kNegInf;
    return out;
  }

  double last(double c) {
    const int j = n_ - 1;
    auto h = [&](double x) {
      x_[j] = x;
      return g();
    };
    const Bracket ba = crossing(h, lo_, kNegInf, c);
    const Bracket bb = crossing(h, hi_, kNegInf, c);
    const double A = mid(ba), B = mid(bb);
    if (!(B > A)) return kNegInf;
    if (!psi_) {
      // int_A^B e^{2x} dx in closed form
      if (A == kNegInf) return 2.0 * B - std::log(2.0);
      return 2.0 * B + std::log(-std::expm1(2.0 * (A - B))) - std::log(2.0);
    }
    SegmentedIntegrator integ{tol(j), nullptr, false, false};
    auto F = [&](double x) {
      x_[j] = x;
      const double gv = g();
      const double p = (*psi_)(x_, gv);
      return p == kNegInf ? kNegInf : 2.0 * x + p;
    };
    auto [v, rel] = integ.integrate(F, A, B);
    max_rel_ = std::max(max_rel_, rel);
    return v;
  }

  const FunctionSpec& spec_;
  int n_;
  double lo_, hi_, log_r_;
  const LogIntegrand* psi_;
  double rel_tol_;
  std::vector<double> x_;
  std::uint64_t nodes_ = 0;
  double max_rel_ = 0.0;
};

// dlambda = 2n a_{2n} e^{2n s} ds in s = log|z|
LevelIntegral radial_level_integral(const FunctionSpec& spec, double lo, double hi, double radius,
                                    const LogIntegrand& log_psi, double rel_tol) {
  const int n = spec.dimension();
  LevelIntegral out;
  auto f = [&](double s) {
    ++out.nodes;
    return spec.radial(s);
  };
  const double top = std::log(radius);
  const double A = mid(crossing(f, lo, kNegInf, top));
  const double B = mid(crossing(f, hi, kNegInf, top));
  if (!(B > A)) return out;
  const double lc = std::log(2.0 * n) + log_ball_coefficient(2 * n);
  if (!log_psi) {
    out.log_value = lc - std::log(2.0 * n) + 2.0 * n * B +
                    (A == kNegInf ? 0.0 : std::log(-std::expm1(2.0 * n * (A - B))));
    return out;
  }
  std::vector<double> x(n);
  const double shift = 0.5 * std::log(double(n));
  auto F = [&](double s) {
    std::fill(x.begin(), x.end(), s - shift);
    const double p = log_psi(x, f(s));
    return p == kNegInf ? kNegInf : 2.0 * n * s + p;
  };
  SegmentedIntegrator integ{rel_tol, nullptr, false, false};
  auto [v, rel] = integ.integrate(F, A, B);
  out.log_value = v == kNegInf ? kNegInf : v + lc;
  out.rel_error = rel;
  return out;
}

VolumeEstimate radial_volume(const FunctionSpec& spec, double t) {
  const int N = 2 * spec.dimension();
  std::uint64_t nodes = 0;
  auto f = [&](double s) {
    ++nodes;
    return spec.radial(s);
  };
  const Bracket b = crossing(f, t, kNegInf, std::log(spec.domain_radius()));
  VolumeEstimate est;
  est.method = VolumeMethod::RadialExact;
  est.nodes = nodes;
  const double la = log_ball_coefficient(N);
  const double s = mid(b);
  est.log_value = s == kNegInf ? kNegInf : std::log(ball_coefficient(N)) + N * s;
  est.value = std::exp(est.log_value);
  if (b.lo != b.hi) {
    est.abs_error = std::exp(la + N * b.hi) - std::exp(la + N * b.lo);
    est.rel_error = -std::expm1(N * (b.lo - b.hi));
  }
  est.empty = (s == kNegInf);
  return est;
}

VolumeEstimate toric_volume(const FunctionSpec& spec, double t, double rel_tol) {
  VolumeEstimate est;
  est.method = VolumeMethod::ToricQuadrature;
  std::vector<double> origin(spec.dimension(), kNegInf);
  if (t <= spec.toric(origin)) {
    est.empty = true;
    est.nodes = 1;
    return est;
  }
  ToricIntegrator integ(spec, kNegInf, t, spec.domain_radius(), nullptr, rel_tol);
  const LevelIntegral r = integ.run();
  if (r.rel_error > 10.0 * rel_tol)
    throw Error(ErrorCode::ToleranceNotMet, "toric quadrature reached relative error " + std::to_string(r.rel_error) +
                                                " at t = " + std::to_string(t));
  est.log_value = r.log_value;
  est.value = std::exp(r.log_value);
  est.rel_error = std::max(r.rel_error, 1e-15);
  est.abs_error = est.value * est.rel_error;
  est.nodes = r.nodes;
  est.empty = r.log_value == kNegInf;
  return est;
}

VolumeMethod default_method(const FunctionSpec& spec) {
  switch (spec.symmetry()) {
    case Symmetry::Radial: return VolumeMethod::RadialExact;
    case Symmetry::Toric: return VolumeMethod::ToricQuadrature;
    case Symmetry::S1Invariant: return VolumeMethod::MonteCarlo;
  }
  return VolumeMethod::MonteCarlo;
}

}  // namespace

LevelIntegral toric_level_integral(const FunctionSpec& spec, double lo, double hi, double radius,
                                   const LogIntegrand& log_psi, double rel_tol) {
  if (spec.symmetry() == Symmetry::S1Invariant)
    throw Error(ErrorCode::SymmetryRequired, "level integrals need a toric or radial spec");
  if (spec.symmetry() == Symmetry::Radial) return radial_level_integral(spec, lo, hi, radius, log_psi, rel_tol);
  ToricIntegrator integ(spec, lo, hi, radius, log_psi ? &log_psi : nullptr, rel_tol);
  return integ.run();
}

std::vector<VolumeEstimate> monte_carlo_volumes(const FunctionSpec& spec, std::span<const double> levels,
                                                const RunConfig& config) {
  const int n = spec.dimension();
  const int N = 2 * n;
  const int shells = config.mc_shells;
  const int strata = shells + 1;
  const std::int64_t per = (config.mc_samples + strata - 1) / strata;
  const double R = spec.domain_radius();
  const double a = ball_coefficient(N);

  // stratum k < shells is the shell between r_{k+1} and r_k, the last one the inner ball
  std::vector<double> rpow(strata + 1);
  for (int k = 0; k <= shells; ++k) rpow[k] = std::pow(R * std::exp(config.mc_inner_log_radius * k / shells), N);
  rpow[strata] = 0.0;

  std::vector<std::vector<std::int64_t>> counts(strata);
  parallel_for(strata, config.workers, [&](std::size_t k) {
    CounterRng rng(config.seed, 0x3C00 + k);
    std::vector<double> vals(per);
    std::vector<double> z(N);
    const double hi = rpow[k], lo = rpow[k + 1];
    for (std::int64_t i = 0; i < per; ++i) {
      const std::uint64_t base = static_cast<std::uint64_t>(i) * (N + 1);
      double norm = 0.0;
      for (int c = 0; c < N; ++c) {
        z[c] = rng.normal(base + c);
        norm = std::hypot(norm, z[c]);
      }
      const double r = std::pow(lo + (hi - lo) * rng.uniform(2 * (base + N)), 1.0 / N);
      for (auto& c : z) c *= r / norm;
      vals[i] = spec.value(z);
    }
    std::sort(vals.begin(), vals.end());
    counts[k].resize(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l)
      counts[k][l] = std::lower_bound(vals.begin(), vals.end(), levels[l]) - vals.begin();
  });

  std::vector<VolumeEstimate> out(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    double v = 0.0, var = 0.0;
    for (int k = 0; k < strata; ++k) {
      const double vol = a * (rpow[k] - rpow[k + 1]);
      const double x = static_cast<double>(counts[k][l]);
      const double p = (x + 1.0) / (per + 2.0);
      v += vol * x / per;
      var += vol * vol * p * (1.0 - p) / per;
    }
    auto& e = out[l];
    e.method = VolumeMethod::MonteCarlo;
    e.value = v;
    e.abs_error = 3.0 * std::sqrt(var);
    e.log_value = v > 0 ? std::log(v) : kNegInf;
    e.rel_error = v > 0 ? e.abs_error / v : 0.0;
    e.nodes = static_cast<std::uint64_t>(per) * strata;
    e.empty = v == 0.0;
  }
  return out;
}

VolumeEstimate sublevel_volume(const FunctionSpec& spec, double t, const RunConfig& config,
                               std::optional<VolumeMethod> force) {
  if (std::isnan(t)) throw Error(ErrorCode::InvalidArgument, "level is NaN");
  const VolumeMethod m = force.value_or(default_method(spec));
  switch (m) {
    case VolumeMethod::RadialExact:
      if (spec.symmetry() != Symmetry::Radial)
        throw Error(ErrorCode::SymmetryRequired, "radial volumes need a radial spec");
      return radial_volume(spec, t);
    case VolumeMethod::ToricQuadrature:
      if (spec.symmetry() == Symmetry::S1Invariant)
        throw Error(ErrorCode::SymmetryRequired, "toric quadrature needs a toric or radial spec");
      return toric_volume(spec, t, config.quad_rel_tol);
    case VolumeMethod::MonteCarlo: {
      const double lv[1] = {t};
      return monte_carlo_volumes(spec, lv, config)[0];
    }
  }
  return {};
}

VolumeProfile volume_profile(const FunctionSpec& spec, std::span<const double> t_grid, const RunConfig& config,
                             std::optional<VolumeMethod> force) {
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "t_grid must be strictly decreasing");
  VolumeProfile out;
  out.points.resize(t_grid.size());
  const VolumeMethod m = force.value_or(default_method(spec));
  if (m == VolumeMethod::MonteCarlo) {
    const auto est = monte_carlo_volumes(spec, t_grid, config);
    for (std::size_t i = 0; i < t_grid.size(); ++i) out.points[i] = {t_grid[i], est[i], false, {}};
  } else {
    RunConfig inner = config;
    inner.workers = 1;
    parallel_for(t_grid.size(), config.workers, [&](std::size_t i) {
      auto& p = out.points[i];
      p.t = t_grid[i];
      try {
        p.estimate = sublevel_volume(spec, t_grid[i], inner, m);
      } catch (const Error& e) {
        p.failed = true;
        p.error = e.what();
        p.estimate.method = m;
      }
    });
  }
  enforce_monotone(out);
  return out;
}

void enforce_monotone(VolumeProfile& profile) {
  profile.max_adjustment = 0.0;
  profile.adjusted_points = 0;
  double running = kInf, running_log = kInf;
  for (auto& p : profile.points) {
    if (p.failed) continue;
    auto& e = p.estimate;
    if (e.log_value > running_log) {
      profile.max_adjustment = std::max(profile.max_adjustment, e.value - running);
      ++profile.adjusted_points;
      e.value = running;
      e.log_value = running_log;
    }
    running = e.value;
    running_log = e.log_value;
  }
}

std::string volume_profile_csv(const VolumeProfile& profile) {
  std::string s = "t,volume,abs_error,method,nodes,log_volume\n";
  char buf[256];
  for (const auto& p : profile.points) {
    const auto& e = p.estimate;
    if (p.failed) {
      std::snprintf(buf, sizeof buf, "%.17g,nan,nan,FAILED,0,nan\n", p.t);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s,%llu,%.17g\n", p.t, e.value, e.abs_error,
                    to_string(e.method), static_cast<unsigned long long>(e.nodes), e.log_value);
    }
    s += buf;
  }
  return s;
}

}  // namespace pshsym
