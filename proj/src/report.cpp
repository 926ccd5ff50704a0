#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "error.hpp"
#include "json_util.hpp"
#include "volume_engine.hpp"

namespace pshsym {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return fmt("%.6g", v + 0.0);  // no "-0"
}

nlohmann::json spec_json(const FunctionSpec& s) {
  nlohmann::json j = {{"name", s.name()},
                      {"dimension", s.dimension()},
                      {"symmetry", to_string(s.symmetry())},
                      {"domain_radius", s.domain_radius()},
                      {"pole_structure", to_string(s.pole_structure())},
                      {"boundary_sup", json_number(s.boundary_sup())}};
  return j;
}

nlohmann::json expected_json(const Expected& e) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j = {{"nu", opt(e.nu)},
                      {"iota", opt(e.iota)},
                      {"nu_hat", opt(e.nu_hat)},
                      {"tau_hat", opt(e.tau_hat)},
                      {"tau_kind", to_string(e.tau_kind)},
                      {"rashkovskii", opt(e.rashkovskii)},
                      {"provenance", e.provenance}};
  if (e.tau_kind == TauKind::Value) j["tau"] = e.tau;
  if (!e.volume_formula.empty()) j["volume_formula"] = e.volume_formula;
  return j;
}

double diagonal_value(const FunctionSpec& s, double t) {
  const int n = s.dimension();
  if (s.symmetry() == Symmetry::S1Invariant) {
    std::vector<LogReal> z(2 * n);
    for (int k = 0; k < n; ++k) z[2 * k] = LogReal::from_log(t - 0.5 * std::log(n));
    return s.value_deep(z);
  }
  std::vector<double> x(n, t - 0.5 * std::log(n));
  return s.toric(x);
}

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> pts;
  bool dashed = false;
};

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<Series>& series) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (auto [x, y] : s.pts)
      if (std::isfinite(x) && std::isfinite(y)) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" font-family=\"sans-serif\" "
                  "font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  s += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(W - L - R) + "\" height=\"" +
       num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    s += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"middle\">" + num(xv) +
         "</text>\n";
    s += "<text x=\"" + num(L - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + num(yv) + "</text>\n";
  }
  s += "<text x=\"" + num((L + W - R) / 2) + "\" y=\"" + num(H - 12) + "\" text-anchor=\"middle\">" + xlabel +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + num((T + H - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num((T + H - B) / 2) + ")\">" + ylabel + "</text>\n";
  int row = 0;
  for (const auto& se : series) {
    std::string path;
    for (auto [x, y] : se.pts)
      if (std::isfinite(x) && std::isfinite(y)) path += num(px(x)) + "," + num(py(y)) + " ";
    s += "<polyline fill=\"none\" stroke=\"" + se.color + "\" stroke-width=\"1.5\"" +
         (se.dashed ? " stroke-dasharray=\"6 4\"" : "") + " points=\"" + path + "\"/>\n";
    const double ly = T + 16 + 16 * row++;
    s += "<line x1=\"" + num(L + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(L + 34) + "\" y2=\"" +
         num(ly - 4) + "\" stroke=\"" + se.color + "\"" + (se.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    s += "<text x=\"" + num(L + 40) + "\" y=\"" + num(ly) + "\">" + se.label + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::vector<double> plot_grid(const AnalysisResult& a) {
  const double top = std::log(a.spec.domain_radius());
  std::vector<double> t;
  for (int i = 0; i <= 240; ++i) t.push_back(top - 12.0 + 12.0 * i / 240);
  return t;
}

}  // namespace

AnalysisResult run_analysis(const FunctionSpec& spec, const RunConfig& config,
                            const std::optional<Expected>& expected) {
  config.validate();
  AnalysisResult a;
  a.spec = spec;
  a.expected = expected;
  a.config = config;
  a.symmetrization = schwarz_symmetrize(spec, config);
  const TauKind kind = expected ? expected->tau_kind : TauKind::Unknown;
  const double tau = expected ? expected->tau : 0.0;
  a.invariants = compute_invariants(a.symmetrization, config, kind, tau);
  a.theorems = verify_theorems(a.invariants, a.symmetrization, config);
  a.equimeasurability =
      equimeasurability_check(a.symmetrization, default_probe_levels(a.symmetrization), config);
  try {
    for (int res = 0; res < 2; ++res)
      a.ma_consistency.push_back(radial_ma_consistency(a.symmetrization.profile(), spec.dimension(),
                                                       a.symmetrization.u_hat.domain_radius(), config, res));
  } catch (const Error& e) {
    a.ma_error = e.what();
  }
  return a;
}

nlohmann::json report_json(const AnalysisResult& a) {
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : a.equimeasurability.probes)
    probes.push_back({{"t", p.t},
                      {"log_mu_u", json_number(p.log_mu_u)},
                      {"log_mu_u_star", json_number(p.log_mu_u_star)},
                      {"log_mu_u_hat", json_number(p.log_mu_u_hat)},
                      {"rel_discrepancy", p.rel_discrepancy}});
  nlohmann::json ma = nlohmann::json::array();
  for (const auto& m : a.ma_consistency) ma.push_back(to_json(m));

  nlohmann::json config;
  to_json(config, a.config);
  nlohmann::json sym = to_json(a.symmetrization);
  sym["checks"]["equimeasurability"] = {{"max_rel_discrepancy", a.equimeasurability.max_rel_discrepancy},
                                        {"probes", probes}};
  sym["checks"]["ma_consistency"] = ma;
  if (!a.ma_error.empty()) sym["checks"]["ma_consistency_error"] = a.ma_error;

  nlohmann::json j = {{"name", a.spec.name()},
                      {"config", config},
                      {"spec", spec_json(a.spec)},
                      {"invariants", to_json(a.invariants)},
                      {"symmetrization", sym},
                      {"unstable", a.unstable()}};
  j["expected"] = a.expected ? expected_json(*a.expected) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json theorems_json(const AnalysisResult& a) {
  nlohmann::json j = to_json(a.theorems);
  nlohmann::json config;
  to_json(config, a.config);
  j["config"] = config;
  return j;
}

std::string volumes_csv(const AnalysisResult& a) { return volume_profile_csv(a.symmetrization.rearrangement.volumes); }

std::string profiles_csv(const AnalysisResult& a) {
  std::string s = "t,u_diagonal,u_hat\n";
  char buf[128];
  const auto& fh = a.symmetrization.profile();
  const FunctionSpec src = a.spec.normalized();
  for (double t : plot_grid(a)) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, diagonal_value(src, t), fh(t));
    s += buf;
  }
  return s;
}

std::string profiles_svg(const AnalysisResult& a) {
  Series u{"u on the diagonal ray", "#1f77b4", {}}, uh{"u-hat profile", "#d62728", {}};
  const auto& fh = a.symmetrization.profile();
  const FunctionSpec src = a.spec.normalized();
  for (double t : plot_grid(a)) {
    u.pts.push_back({t, diagonal_value(src, t)});
    uh.pts.push_back({t, fh(t)});
  }
  return svg_plot(a.spec.name() + ": profiles", "t = log|z|", "value", {u, uh});
}

std::string volume_svg(const AnalysisResult& a) {
  Series mu{"log mu(t)", "#1f77b4", {}};
  for (const auto& p : a.symmetrization.rearrangement.volumes.points)
    if (!p.failed && !p.estimate.empty) mu.pts.push_back({p.t, p.estimate.log_value});
  std::vector<Series> all{mu};
  const double io = a.invariants.iota_volume.slope;
  if (!mu.pts.empty() && io > 0 && std::isfinite(io)) {
    const auto deep = *std::min_element(mu.pts.begin(), mu.pts.end());
    Series fit{"slope 2 / iota = " + num(2.0 / io), "#2ca02c", {}, true};
    for (const auto& [t, y] : mu.pts) fit.pts.push_back({t, deep.second + 2.0 / io * (t - deep.first)});
    all.push_back(fit);
  }
  return svg_plot(a.spec.name() + ": sub-level volumes", "t", "log |{u < t}|", all);
}

std::string summary_markdown(const AnalysisResult& a) {
  const auto& inv = a.invariants;
  std::string s = "# " + a.spec.name() + "\n\n";
  s += "dimension " + std::to_string(a.spec.dimension()) + ", symmetry " + to_string(a.spec.symmetry()) +
       ", seed " + std::to_string(a.config.seed) + "\n\n";
  s += "| quantity | value | stderr | unstable |\n|---|---|---|---|\n";
  auto row = [&](const std::string& name, const SlopeEstimate& e) {
    s += "| " + name + " | " + num(e.slope) + " | " + num(e.std_error) + " | " + (e.unstable ? "yes" : "no") + " |\n";
  };
  row("nu", inv.nu);
  row("iota (volume)", inv.iota_volume);
  if (inv.iota_kiselman) row("iota (Kiselman)", inv.iota_kiselman->slope);
  row("nu_hat", inv.nu_hat);
  s += "| tau_hat | " + num(inv.tau_hat) + " | | |\n";
  if (inv.rashkovskii_lb) s += "| Rashkovskii bound | " + num(inv.rashkovskii_lb->value) + " | | |\n";
  s += "\n| check | status | margin | tolerance |\n|---|---|---|---|\n";
  for (const auto& c : a.theorems.checks)
    s += "| " + c.id + " | " + to_string(c.status) + " | " + num(c.margin) + " | " + num(c.tolerance) + " |\n";
  s += "\nequimeasurability max relative discrepancy: " + num(a.equimeasurability.max_rel_discrepancy) + "\n";
  for (const auto& m : a.ma_consistency)
    s += "Monge-Ampere consistency (resolution " + std::to_string(m.resolution) + "): gap " + num(m.rel_gap) + "\n";
  if (!a.ma_error.empty()) s += "Monge-Ampere consistency: " + a.ma_error + "\n";
  return s;
}

std::vector<ReproduceRow> reproduce_rows(const AnalysisResult& a) {
  std::vector<ReproduceRow> rows;
  if (!a.expected) return rows;
  const auto& e = *a.expected;
  const auto& inv = a.invariants;
  auto add = [&](const char* q, const std::optional<double>& want, double got, double tol) {
    if (want) rows.push_back({a.spec.name(), q, *want, got, tol});
  };
  add("nu", e.nu, inv.nu.slope, 0.05);
  add("nu_hat", e.nu_hat, inv.nu_hat.slope, 0.05);
  add("iota", e.iota, inv.iota_volume.slope, 0.05);
  if (e.tau_hat) add("tau_hat", e.tau_hat, inv.tau_hat, 0.05 * std::max(1.0, std::fabs(*e.tau_hat)));
  if (inv.rashkovskii_lb) add("rashkovskii", e.rashkovskii, inv.rashkovskii_lb->value, 0.05);
  return rows;
}

std::string reproduce_markdown(std::span<const AnalysisResult* const> results) {
  std::string s = "| entry | quantity | expected | computed | deviation | within tolerance |\n"
                  "|---|---|---|---|---|---|\n";
  for (const auto* a : results) {
    for (const auto& r : reproduce_rows(*a)) {
      const double d = std::fabs(r.computed - r.expected);
      s += "| " + r.entry + " | " + r.quantity + " | " + num(r.expected) + " | " + num(r.computed) + " | " +
           fmt("%.2e", d) + " | " + (d <= r.tolerance ? "yes" : "NO") + " |\n";
    }
    if (a->expected && a->expected->tau_kind != TauKind::Value && a->expected->tau_kind != TauKind::Unknown)
      s += "| " + a->spec.name() + " | tau | " + to_string(a->expected->tau_kind) + " | | | |\n";
  }
  return s;
}

std::string verify_markdown(std::span<const AnalysisResult* const> results) {
  std::string s;
  if (results.empty()) return s;
  s = "| entry |";
  std::string sep = "|---|";
  for (const auto& c : results.front()->theorems.checks) {
    s += " " + c.id + " |";
    sep += "---|";
  }
  s += "\n" + sep + "\n";
  for (const auto* a : results) {
    s += "| " + a->spec.name() + " |";
    for (const auto& c : a->theorems.checks) s += std::string(" ") + to_string(c.status) + " |";
    s += "\n";
  }
  return s;
}

}  // namespace pshsym
