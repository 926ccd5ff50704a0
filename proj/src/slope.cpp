#include "slope.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace pshsym {

const char* to_string(SlopeMethod m) {
  switch (m) {
    case SlopeMethod::ProfileDerivative: return "PROFILE_DERIVATIVE";
    case SlopeMethod::MaxOnSpheres: return "MAX_ON_SPHERES";
    case SlopeMethod::MeanOnTori: return "MEAN_ON_TORI";
    case SlopeMethod::VolumeLogRatio: return "VOLUME_LOG_RATIO";
  }
  return "?";
}

LinearFit weighted_line_fit(std::span<const double> t, std::span<const double> y, std::span<const double> w) {
  const std::size_t n = t.size();
  if (n < 2 || y.size() != n || w.size() != n) throw Error(ErrorCode::InvalidArgument, "line fit needs >= 2 points");
  double sw = 0, st = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    st += w[i] * t[i];
    sy += w[i] * y[i];
  }
  const double tm = st / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (t[i] - tm) * (t[i] - tm);
    sxy += w[i] * (t[i] - tm) * (y[i] - ym);
  }
  if (!(sxx > 0)) throw Error(ErrorCode::InvalidArgument, "line fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * tm;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * t[i];
      rss += w[i] * r * r;
    }
    fit.std_error = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

std::vector<double> slope_window(double t_lo, int points) {
  if (!(t_lo < 0) || points < 4) throw Error(ErrorCode::InvalidArgument, "slope window needs t_lo < 0 and >= 4 points");
  std::vector<double> t(points);
  const double t_hi = t_lo / 3.0;
  for (int i = 0; i < points; ++i) t[i] = t_lo + (t_hi - t_lo) * i / (points - 1);
  return t;
}

SlopeEstimate fit_asymptotic_slope(std::span<const double> t, std::span<const double> y, SlopeMethod method,
                                   double stability_floor, bool nonnegative) {
  const std::size_t n = t.size();
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "slope fit needs >= 4 points");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::fabs(t[i]);

  SlopeEstimate s;
  s.method = method;
  s.points_used = static_cast<int>(n);
  s.t_lo = *std::min_element(t.begin(), t.end());
  s.t_hi = *std::max_element(t.begin(), t.end());
  const LinearFit full = weighted_line_fit(t, y, w);
  s.slope = full.slope;
  s.std_error = full.std_error;

  // deeper half by abscissa
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  const std::size_t h = std::max<std::size_t>(n / 2, 3);
  std::vector<double> th(h), yh(h), wh(h);
  for (std::size_t i = 0; i < h; ++i) {
    th[i] = t[idx[i]];
    yh[i] = y[idx[i]];
    wh[i] = w[idx[i]];
  }
  s.refit_slope = weighted_line_fit(th, yh, wh).slope;
  s.unstable = std::fabs(s.refit_slope - s.slope) > std::max(3.0 * s.std_error, stability_floor);
  if (!std::isfinite(s.slope)) s.unstable = true;

  if (nonnegative && s.slope < 0 && s.slope >= -std::max(3.0 * s.std_error, stability_floor)) {
    s.note = "clamped negative slope " + std::to_string(s.slope) + " to 0";
    s.slope = 0.0;
  }
  return s;
}

nlohmann::json to_json(const SlopeEstimate& s) {
  nlohmann::json j = {{"slope", s.slope},
                      {"stderr", s.std_error},
                      {"window", {s.t_lo, s.t_hi}},
                      {"points_used", s.points_used},
                      {"method", to_string(s.method)},
                      {"refit_slope", s.refit_slope},
                      {"unstable", s.unstable},
                      {"window_shrunk", s.window_shrunk}};
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

}  // namespace pshsym
