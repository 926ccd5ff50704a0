#include "pshsym/pshsym.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "error.hpp"
#include "report.hpp"
#include "volume_engine.hpp"

struct psh_config {
  pshsym::RunConfig config;
};

struct psh_spec {
  pshsym::FunctionSpec spec;
  std::optional<pshsym::Expected> expected;
};

struct psh_analysis {
  pshsym::AnalysisResult result;
};

namespace {

thread_local std::string g_last_error;

psh_status status_of(pshsym::ErrorCode c) {
  using pshsym::ErrorCode;
  switch (c) {
    case ErrorCode::SchemaError: return PSH_SCHEMA_ERROR;
    case ErrorCode::SymmetryViolation: return PSH_SYMMETRY_VIOLATION;
    case ErrorCode::NotPshProfile: return PSH_NOT_PSH_PROFILE;
    case ErrorCode::OutOfDomain: return PSH_OUT_OF_DOMAIN;
    case ErrorCode::ToleranceNotMet: return PSH_TOLERANCE_NOT_MET;
    case ErrorCode::GridTooCoarse: return PSH_GRID_TOO_COARSE;
    case ErrorCode::ConvexityViolation: return PSH_CONVEXITY_VIOLATION;
    case ErrorCode::SymmetryRequired: return PSH_SYMMETRY_REQUIRED;
    case ErrorCode::SinglePoleRequired: return PSH_SINGLE_POLE_REQUIRED;
    case ErrorCode::NumericalGradientUnstable: return PSH_NUMERICAL_GRADIENT_UNSTABLE;
    case ErrorCode::InvalidArgument: return PSH_INVALID_ARGUMENT;
    case ErrorCode::UnknownName: return PSH_UNKNOWN_NAME;
    case ErrorCode::Io: return PSH_IO_ERROR;
  }
  return PSH_INTERNAL_ERROR;
}

template <class F>
psh_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return PSH_OK;
  } catch (const pshsym::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return PSH_INTERNAL_ERROR;
}

void require(const void* p, const char* what) {
  if (!p) throw pshsym::Error(pshsym::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

pshsym::LoadOptions load_options(const psh_config* c) {
  pshsym::LoadOptions o;
  if (c) {
    o.seed = c->config.seed;
    o.t_min = c->config.t_min;
  }
  return o;
}

}  // namespace

extern "C" {

const char* psh_status_name(psh_status s) {
  switch (s) {
    case PSH_OK: return "OK";
    case PSH_INTERNAL_ERROR: return "INTERNAL_ERROR";
    default: break;
  }
  if (s >= PSH_SCHEMA_ERROR && s <= PSH_IO_ERROR)
    return pshsym::to_string(static_cast<pshsym::ErrorCode>(static_cast<int>(s) - 1));
  return "UNKNOWN";
}

const char* psh_last_error(void) { return g_last_error.c_str(); }

void psh_string_free(char* s) { std::free(s); }

const char* psh_version(void) { return "1.0.0"; }

psh_status psh_config_new(psh_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new psh_config{};
  });
}

void psh_config_free(psh_config* c) { delete c; }

psh_status psh_config_apply_json(psh_config* c, const char* json) {
  return guarded([&] {
    require(c, "config");
    require(json, "json");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      throw pshsym::Error(pshsym::ErrorCode::SchemaError, e.what());
    }
    pshsym::RunConfig next = c->config;
    pshsym::apply_json(next, j);
    next.validate();
    c->config = next;
  });
}

psh_status psh_config_to_json(const psh_config* c, char** out) {
  return guarded([&] {
    require(c, "config");
    require(out, "out");
    nlohmann::json j;
    to_json(j, c->config);
    *out = dup_string(j.dump(2));
  });
}

psh_status psh_config_set_seed(psh_config* c, uint64_t seed) {
  return guarded([&] {
    require(c, "config");
    c->config.seed = seed;
  });
}

psh_status psh_config_set_workers(psh_config* c, int workers) {
  return guarded([&] {
    require(c, "config");
    if (workers < 0) throw pshsym::Error(pshsym::ErrorCode::InvalidArgument, "workers must be >= 0");
    c->config.workers = workers;
  });
}

psh_status psh_catalog_names(char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup_string(nlohmann::json(pshsym::catalog_names()).dump());
  });
}

psh_status psh_spec_from_catalog(const char* name, const psh_config* c, psh_spec** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    auto e = pshsym::catalog_entry(name, load_options(c));
    *out = new psh_spec{std::move(e.spec), std::move(e.expected)};
  });
}

psh_status psh_spec_from_json(const char* json, const psh_config* c, psh_spec** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new psh_spec{pshsym::load_spec_text(json, load_options(c)), std::nullopt};
  });
}

void psh_spec_free(psh_spec* s) { delete s; }

psh_status psh_spec_name(const psh_spec* s, char** out) {
  return guarded([&] {
    require(s, "spec");
    require(out, "out");
    *out = dup_string(s->spec.name());
  });
}

psh_status psh_spec_dimension(const psh_spec* s, int* out) {
  return guarded([&] {
    require(s, "spec");
    require(out, "out");
    *out = s->spec.dimension();
  });
}

psh_status psh_spec_evaluate(const psh_spec* s, const double* z, size_t len, double* out) {
  return guarded([&] {
    require(s, "spec");
    require(z, "z");
    require(out, "out");
    *out = s->spec.evaluate(std::span<const double>(z, len)).value();
  });
}

psh_status psh_sublevel_volume(const psh_spec* s, double t, const psh_config* c, double* value, double* abs_error) {
  return guarded([&] {
    require(s, "spec");
    require(value, "value");
    const pshsym::RunConfig cfg = c ? c->config : pshsym::RunConfig{};
    const auto v = pshsym::sublevel_volume(s->spec, t, cfg);
    *value = v.value;
    if (abs_error) *abs_error = v.abs_error;
  });
}

psh_status psh_analyze(const psh_spec* s, const psh_config* c, psh_analysis** out) {
  return guarded([&] {
    require(s, "spec");
    require(out, "out");
    const pshsym::RunConfig cfg = c ? c->config : pshsym::RunConfig{};
    auto a = std::make_unique<psh_analysis>();
    a->result = pshsym::run_analysis(s->spec, cfg, s->expected);
    *out = a.release();
  });
}

void psh_analysis_free(psh_analysis* a) { delete a; }

psh_status psh_analysis_name(const psh_analysis* a, char** out) {
  return guarded([&] {
    require(a, "analysis");
    require(out, "out");
    *out = dup_string(a->result.spec.name());
  });
}

psh_status psh_analysis_artifact(const psh_analysis* a, const char* kind, char** out) {
  return guarded([&] {
    require(a, "analysis");
    require(kind, "kind");
    require(out, "out");
    const auto& r = a->result;
    const std::string k = kind;
    std::string s;
    if (k == "report.json")
      s = pshsym::report_json(r).dump(2) + "\n";
    else if (k == "theorems.json")
      s = pshsym::theorems_json(r).dump(2) + "\n";
    else if (k == "volumes.csv")
      s = pshsym::volumes_csv(r);
    else if (k == "profiles.csv")
      s = pshsym::profiles_csv(r);
    else if (k == "summary.md")
      s = pshsym::summary_markdown(r);
    else if (k == "plots/profiles.svg")
      s = pshsym::profiles_svg(r);
    else if (k == "plots/volume.svg")
      s = pshsym::volume_svg(r);
    else
      throw pshsym::Error(pshsym::ErrorCode::UnknownName, "unknown artifact '" + k + "'");
    *out = dup_string(s);
  });
}

psh_status psh_analysis_flags(const psh_analysis* a, int* unstable, int* all_pass) {
  return guarded([&] {
    require(a, "analysis");
    if (unstable) *unstable = a->result.unstable() ? 1 : 0;
    if (all_pass) *all_pass = a->result.theorems.all_pass() ? 1 : 0;
  });
}

namespace {

std::vector<const pshsym::AnalysisResult*> unwrap(const psh_analysis* const* items, size_t count) {
  if (count > 0) require(items, "items");
  std::vector<const pshsym::AnalysisResult*> v;
  for (size_t i = 0; i < count; ++i) {
    require(items[i], "analysis");
    v.push_back(&items[i]->result);
  }
  return v;
}

}  // namespace

psh_status psh_reproduce_markdown(const psh_analysis* const* items, size_t count, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup_string(pshsym::reproduce_markdown(unwrap(items, count)));
  });
}

psh_status psh_verify_markdown(const psh_analysis* const* items, size_t count, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup_string(pshsym::verify_markdown(unwrap(items, count)));
  });
}

}  // extern "C"
