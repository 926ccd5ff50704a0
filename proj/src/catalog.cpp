#include "catalog.hpp"

#include <cmath>
#include <cstdio>

#include "error.hpp"

namespace pshsym {

using nlohmann::json;

const char* to_string(TauKind k) {
  switch (k) {
    case TauKind::Unknown: return "UNKNOWN";
    case TauKind::Value: return "VALUE";
    case TauKind::Unbounded: return "UNBOUNDED";
    case TauKind::Undefined: return "UNDEFINED";
  }
  return "?";
}

std::string format_parameter(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

json log_abs(int k) { return json::array({"log", json::array({"abs_coord", k})}); }

CatalogEntry build(const std::string& name, int n, const char* symmetry, json expr, const LoadOptions& opt,
                   double radius = 1.0) {
  json doc = {{"name", name},
              {"dimension", n},
              {"symmetry", symmetry},
              {"domain_radius", radius},
              {"body", {{"kind", "closed_form"}, {"expr", std::move(expr)}}}};
  return {name, load_spec(doc, opt), {}};
}

CatalogEntry ex41(const LoadOptions& opt) {
  auto e = build("ex-4.1", 2, "toric", log_abs(1), opt);
  e.expected.nu = 1.0;
  e.expected.iota = 1.0;
  e.expected.nu_hat = 2.0;
  e.expected.tau_hat = 4.0;
  e.expected.volume_formula = "|{u < log R}| = pi^2 (R^2 - R^4/2)";
  e.expected.provenance = "example 4.1: u = log|z1|";
  return e;
}

CatalogEntry ex42(const LoadOptions& opt) {
  json expr = {"log", {"+", {"pow", {"abs_coord", 1}, 2}, {"pow", {"abs_coord", 2}, 0.5}}};
  auto e = build("ex-4.2", 2, "toric", expr, opt);
  e.expected.nu = 0.5;
  e.expected.iota = 0.4;
  e.expected.nu_hat = 0.8;
  e.expected.tau_hat = 0.64;
  e.expected.tau_kind = TauKind::Value;
  e.expected.tau = 1.0;
  e.expected.rashkovskii = 1.0;
  e.expected.volume_formula = "|{u < 2 log R}| ~ pi^2 R^10 / 5";
  e.expected.provenance = "example 4.2: u = log(|z1|^2 + |z2|^(1/2))";
  return e;
}

CatalogEntry ex43(const LoadOptions& opt) {
  json expr = {"*", {"pow", {"*", -1, log_abs(1)}, 0.5}, {"+", {"pow", {"abs_coord", 2}, 2}, -1}};
  auto e = build("ex-4.3", 2, "toric", expr, opt, 0.5);
  e.expected.nu = 0.0;
  e.expected.iota = 0.0;
  e.expected.nu_hat = 0.0;
  e.expected.tau_hat = 0.0;
  e.expected.tau_kind = TauKind::Unbounded;
  e.expected.provenance = "example 4.3: u = (-log|z1|)^(1/2) (|z2|^2 - 1) on the ball of radius 1/2";
  return e;
}

CatalogEntry ex44(const LoadOptions& opt) {
  json expr = {"*", 2, {"+", log_abs(1), log_abs(2)}};
  auto e = build("ex-4.4", 2, "toric", expr, opt);
  e.expected.nu = 4.0;
  e.expected.iota = 2.0;
  e.expected.nu_hat = 4.0;
  e.expected.tau_hat = 16.0;
  e.expected.tau_kind = TauKind::Undefined;
  e.expected.provenance = "example 4.4: u = 2 log|z1 z2|";
  return e;
}

}  // namespace

CatalogEntry make_log_norm(int n, double gamma, const LoadOptions& opt) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "log-norm needs n >= 1");
  if (!(gamma > 0)) throw Error(ErrorCode::InvalidArgument, "log-norm scale must be > 0");
  json expr = {"log", {"norm"}};
  std::string name = "log-norm-n" + std::to_string(n);
  if (gamma != 1.0) {
    expr = {"*", gamma, expr};
    name += "-g" + format_parameter(gamma);
  }
  auto e = build(name, n, "radial", expr, opt);
  e.expected.nu = gamma;
  e.expected.iota = gamma / n;
  e.expected.nu_hat = gamma;
  e.expected.tau_hat = std::pow(gamma, n);
  e.expected.tau_kind = TauKind::Value;
  e.expected.tau = std::pow(gamma, n);
  e.expected.rashkovskii = std::pow(gamma, n);
  e.expected.volume_formula = "|{u < t}| = a_2n exp(2 n t / gamma)";
  e.expected.provenance = "radial identity case: u = gamma log|z|";
  return e;
}

CatalogEntry make_demailly(double eps, const LoadOptions& opt) {
  if (!(eps > 0 && eps <= 1)) throw Error(ErrorCode::InvalidArgument, "demailly eps must be in (0, 1]");
  json expr = {"max", {"*", 1.0 / eps, log_abs(1)}, {"*", eps, log_abs(2)}};
  auto e = build("demailly-" + format_parameter(eps), 2, "toric", expr, opt);
  const double s = eps + 1.0 / eps;
  e.expected.nu = eps;
  e.expected.iota = 1.0 / s;
  e.expected.nu_hat = 2.0 / s;
  e.expected.tau_hat = 4.0 / (s * s);
  e.expected.tau_kind = TauKind::Value;
  e.expected.tau = 1.0;
  e.expected.rashkovskii = 1.0;
  e.expected.provenance = "demailly family: u = max(log|z1|/eps, eps log|z2|)";
  return e;
}

std::vector<std::string> catalog_names() {
  return {"ex-4.1",      "ex-4.2",      "demailly-0.25", "demailly-0.5",      "demailly-0.75", "ex-4.3",
          "ex-4.4",      "log-norm-n1", "log-norm-n2",   "log-norm-n3",       "log-norm-n2-g0.5",
          "log-norm-n2-g2"};
}

std::vector<CatalogEntry> builtin_catalog(const LoadOptions& options) {
  std::vector<CatalogEntry> out;
  for (const auto& name : catalog_names()) out.push_back(catalog_entry(name, options));
  return out;
}

CatalogEntry catalog_entry(const std::string& name, const LoadOptions& opt) {
  if (name == "ex-4.1") return ex41(opt);
  if (name == "ex-4.2") return ex42(opt);
  if (name == "ex-4.3") return ex43(opt);
  if (name == "ex-4.4") return ex44(opt);
  auto parse_number = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw Error(ErrorCode::UnknownName, "unknown catalog entry '" + name + "'");
    return v;
  };
  if (name.rfind("demailly-", 0) == 0) return make_demailly(parse_number(name.substr(9)), opt);
  if (name == "log-norm") return make_log_norm(2, 1.0, opt);
  if (name.rfind("log-norm-n", 0) == 0) {
    std::string rest = name.substr(10);
    double gamma = 1.0;
    if (auto g = rest.find("-g"); g != std::string::npos) {
      gamma = parse_number(rest.substr(g + 2));
      rest = rest.substr(0, g);
    }
    const double n = parse_number(rest);
    if (n != std::floor(n) || n < 1 || n > 16)
      throw Error(ErrorCode::UnknownName, "unknown catalog entry '" + name + "'");
    return make_log_norm(static_cast<int>(n), gamma, opt);
  }
  throw Error(ErrorCode::UnknownName, "unknown catalog entry '" + name + "'");
}

}  // namespace pshsym
