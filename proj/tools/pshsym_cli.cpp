// pshsym command line: analyze, verify, reproduce.
//
// Exit codes
//   0  completed, every estimate stable (verify: every applicable check passed)
//   1  hard error (bad input, schema, io), or verify found a FAIL
//   2  completed but some slope estimate is UNSTABLE

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pshsym/pshsym.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnstable = 2;

struct ApiError : std::runtime_error {
  psh_status status;
  ApiError(psh_status s, const std::string& where)
      : std::runtime_error(where + ": " + psh_status_name(s) + ": " + psh_last_error()), status(s) {}
};

void check(psh_status s, const char* where) {
  if (s != PSH_OK) throw ApiError(s, where);
}

struct CString {
  char* p = nullptr;
  ~CString() { psh_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct ConfigDeleter { void operator()(psh_config* c) const { psh_config_free(c); } };
struct SpecDeleter { void operator()(psh_spec* s) const { psh_spec_free(s); } };
struct AnalysisDeleter { void operator()(psh_analysis* a) const { psh_analysis_free(a); } };
using ConfigPtr = std::unique_ptr<psh_config, ConfigDeleter>;
using SpecPtr = std::unique_ptr<psh_spec, SpecDeleter>;
using AnalysisPtr = std::unique_ptr<psh_analysis, AnalysisDeleter>;

struct Options {
  std::vector<std::string> targets;
  std::vector<std::string> spec_paths;
  std::vector<std::string> catalog;
  std::optional<int> n;
  std::vector<double> eps;
  std::optional<std::uint64_t> seed;
  std::optional<long long> mc_samples;
  std::optional<double> t_min;
  std::optional<double> rel_tol;
  std::optional<int> workers;
  std::string config_path;
  std::string out = "out";
  std::vector<std::string> formats;
  bool all = false;
  bool quiet = false;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& body) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << body;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string format_eps(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// flags > PSH_SYMM_SEED > config file > defaults
ConfigPtr build_config(const Options& o) {
  psh_config* raw = nullptr;
  check(psh_config_new(&raw), "config");
  ConfigPtr cfg(raw);
  if (!o.config_path.empty()) check(psh_config_apply_json(cfg.get(), read_file(o.config_path).c_str()), o.config_path.c_str());

  nlohmann::json j = nlohmann::json::object();
  if (const char* env = std::getenv("PSH_SYMM_SEED"); env && *env && !o.seed) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw std::runtime_error("PSH_SYMM_SEED is not an unsigned integer");
    j["seed"] = v;
  }
  if (o.seed) j["seed"] = *o.seed;
  if (o.mc_samples) j["mc_samples"] = *o.mc_samples;
  if (o.t_min) j["t_min"] = *o.t_min;
  if (o.rel_tol) j["quad_rel_tol"] = *o.rel_tol;
  if (!o.formats.empty()) j["formats"] = o.formats;
  if (!j.empty()) check(psh_config_apply_json(cfg.get(), j.dump().c_str()), "flags");
  if (o.workers) check(psh_config_set_workers(cfg.get(), *o.workers), "--workers");
  return cfg;
}

std::vector<std::string> effective_formats(const psh_config* cfg) {
  CString s;
  check(psh_config_to_json(cfg, &s.p), "config");
  auto j = nlohmann::json::parse(s.str());
  return j.value("formats", std::vector<std::string>{"json", "csv", "svg"});
}

struct Target {
  std::string label;
  bool is_file = false;
};

// "log-norm" and "demailly" are families: --n and --eps pick the members.
std::vector<Target> resolve_targets(const Options& o) {
  std::vector<std::string> names;
  std::vector<Target> out;
  if (o.all) {
    CString s;
    check(psh_catalog_names(&s.p), "catalog");
    for (const auto& n : nlohmann::json::parse(s.str())) names.push_back(n.get<std::string>());
  }
  for (const auto& p : o.spec_paths) out.push_back({p, true});
  for (const auto& c : o.catalog) names.push_back(c);
  for (const auto& t : o.targets) {
    if (t.size() > 5 && t.substr(t.size() - 5) == ".json")
      out.push_back({t, true});
    else
      names.push_back(t);
  }
  for (const auto& name : names) {
    if (name == "log-norm" && o.n) {
      out.push_back({"log-norm-n" + std::to_string(*o.n), false});
    } else if (name == "demailly") {
      if (o.eps.empty()) throw std::runtime_error("demailly needs --eps");
      for (double e : o.eps) out.push_back({"demailly-" + format_eps(e), false});
    } else {
      out.push_back({name, false});
    }
  }
  if (out.empty()) throw std::runtime_error("nothing to do: give a catalog name, --spec PATH or --all");
  return out;
}

SpecPtr load_target(const Target& t, const psh_config* cfg) {
  psh_spec* raw = nullptr;
  if (t.is_file)
    check(psh_spec_from_json(read_file(t.label).c_str(), cfg, &raw), t.label.c_str());
  else
    check(psh_spec_from_catalog(t.label.c_str(), cfg, &raw), t.label.c_str());
  return SpecPtr(raw);
}

std::string artifact(const psh_analysis* a, const char* kind) {
  CString s;
  check(psh_analysis_artifact(a, kind, &s.p), kind);
  return s.str();
}

// Files go to a hidden sibling first and are renamed into place, so an
// interrupted run never leaves a partial <out>/<name>.
void emit(const psh_analysis* a, const fs::path& out_root, const std::vector<std::string>& formats) {
  CString name;
  check(psh_analysis_name(a, &name.p), "name");
  auto has = [&](const char* f) {
    for (const auto& x : formats)
      if (x == f) return true;
    return false;
  };
  const fs::path final_dir = out_root / name.str();
  const fs::path tmp = out_root / ("." + name.str() + ".partial");
  fs::remove_all(tmp);
  try {
    if (has("json")) {
      write_file(tmp / "report.json", artifact(a, "report.json"));
      write_file(tmp / "theorems.json", artifact(a, "theorems.json"));
    }
    if (has("csv")) {
      write_file(tmp / "volumes.csv", artifact(a, "volumes.csv"));
      write_file(tmp / "profiles.csv", artifact(a, "profiles.csv"));
    }
    if (has("svg")) {
      // best effort: a plot failure never fails the run
      for (const char* k : {"plots/profiles.svg", "plots/volume.svg"}) {
        try {
          write_file(tmp / k, artifact(a, k));
        } catch (const std::exception& e) {
          std::cerr << "warning: " << e.what() << "\n";
        }
      }
    }
    write_file(tmp / "summary.md", artifact(a, "summary.md"));
    fs::remove_all(final_dir);
    fs::rename(tmp, final_dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

struct RunOutcome {
  std::vector<AnalysisPtr> analyses;
  bool unstable = false;
  bool failed = false;
};

RunOutcome run_all(const Options& o) {
  ConfigPtr cfg = build_config(o);
  const auto formats = effective_formats(cfg.get());
  const fs::path out_root = o.out;
  fs::create_directories(out_root);
  RunOutcome r;
  for (const auto& t : resolve_targets(o)) {
    SpecPtr spec = load_target(t, cfg.get());
    psh_analysis* raw = nullptr;
    check(psh_analyze(spec.get(), cfg.get(), &raw), t.label.c_str());
    AnalysisPtr a(raw);
    emit(a.get(), out_root, formats);
    int unstable = 0, all_pass = 0;
    check(psh_analysis_flags(a.get(), &unstable, &all_pass), "flags");
    r.unstable |= unstable != 0;
    r.failed |= all_pass == 0;
    if (!o.quiet) {
      CString name;
      check(psh_analysis_name(a.get(), &name.p), "name");
      std::cerr << name.str() << ": " << (all_pass ? "pass" : "FAIL") << (unstable ? " UNSTABLE" : "") << "\n";
    }
    r.analyses.push_back(std::move(a));
  }
  return r;
}

std::vector<const psh_analysis*> raw_list(const RunOutcome& r) {
  std::vector<const psh_analysis*> v;
  for (const auto& a : r.analyses) v.push_back(a.get());
  return v;
}

int cmd_analyze(const Options& o) {
  const RunOutcome r = run_all(o);
  if (!o.quiet) {
    for (const auto& a : r.analyses) std::cout << artifact(a.get(), "summary.md") << "\n";
  }
  return r.unstable ? kExitUnstable : kExitOk;
}

int cmd_verify(const Options& o) {
  const RunOutcome r = run_all(o);
  const auto list = raw_list(r);
  CString md;
  check(psh_verify_markdown(list.data(), list.size(), &md.p), "verify");
  write_file(fs::path(o.out) / "verify.md", md.str());
  std::cout << md.str();
  if (r.failed) return kExitError;
  return r.unstable ? kExitUnstable : kExitOk;
}

int cmd_reproduce(Options o) {
  if (o.targets.empty() && o.catalog.empty() && o.spec_paths.empty() && !o.all)
    o.targets = {"ex-4.1", "ex-4.2", "ex-4.3", "ex-4.4", "demailly-0.25", "demailly-0.5", "demailly-0.75"};
  const RunOutcome r = run_all(o);
  const auto list = raw_list(r);
  CString md;
  check(psh_reproduce_markdown(list.data(), list.size(), &md.p), "reproduce");
  write_file(fs::path(o.out) / "reproduce.md", md.str());
  std::cout << md.str();
  return r.unstable ? kExitUnstable : kExitOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("targets", o.targets, "catalog names or spec files (*.json)");
  sub->add_option("--spec", o.spec_paths, "function spec JSON file");
  sub->add_option("--catalog", o.catalog, "catalog entry name");
  sub->add_option("--n", o.n, "dimension for the log-norm family")->check(CLI::Range(1, 16));
  sub->add_option("--eps", o.eps, "comma separated parameters for the demailly family")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "RNG seed (fallback: PSH_SYMM_SEED)");
  sub->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples per volume")->check(CLI::PositiveNumber);
  sub->add_option("--t-min", o.t_min, "deepest level of the slope window (negative)");
  sub->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--workers", o.workers, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--format", o.formats, "subset of json,csv,svg")
      ->delimiter(',')
      ->check(CLI::IsMember({"json", "csv", "svg"}));
  sub->add_flag("--all", o.all, "every built-in catalog entry");
  sub->add_flag("-q,--quiet", o.quiet, "no progress on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lelong numbers, integrability indices and Schwarz symmetrization of psh functions"};
  app.set_version_flag("--version", std::string(psh_version()));
  app.require_subcommand(1);

  Options opt;
  auto* analyze = app.add_subcommand("analyze", "invariants and reports for one or more functions");
  auto* verify = app.add_subcommand("verify", "run the theorem checks and write a summary table");
  auto* reproduce = app.add_subcommand("reproduce", "expected versus computed values for the worked examples");
  for (auto* s : {analyze, verify, reproduce}) add_common(s, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (*analyze) return cmd_analyze(opt);
    if (*verify) return cmd_verify(opt);
    return cmd_reproduce(opt);
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}
