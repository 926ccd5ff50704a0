#pragma once

#include <optional>
#include <string>
#include <vector>

#include "function_model.hpp"

namespace pshsym {

/// Ground truth for the residue mass of the original function.
enum class TauKind { Unknown, Value, Unbounded, Undefined };
const char* to_string(TauKind k);

struct Expected {
  std::optional<double> nu;
  std::optional<double> iota;
  std::optional<double> nu_hat;
  std::optional<double> tau_hat;
  TauKind tau_kind = TauKind::Unknown;
  double tau = 0.0;  // meaningful when tau_kind == Value
  std::optional<double> rashkovskii;
  std::string volume_formula;
  std::string provenance;
};

struct CatalogEntry {
  std::string name;
  FunctionSpec spec;
  Expected expected;
};

std::vector<CatalogEntry> builtin_catalog(const LoadOptions& options = {});
std::vector<std::string> catalog_names();

/// Resolves a catalog name. Besides the fixed names this accepts
/// "log-norm-n<N>", "log-norm-n<N>-g<gamma>" and "demailly-<eps>".
CatalogEntry catalog_entry(const std::string& name, const LoadOptions& options = {});

CatalogEntry make_log_norm(int n, double gamma, const LoadOptions& options = {});
CatalogEntry make_demailly(double eps, const LoadOptions& options = {});

/// Shortest decimal spelling used in generated names ("0.5", "0.25", "2").
std::string format_parameter(double v);

}  // namespace pshsym
