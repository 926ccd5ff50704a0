#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"
#include "config.hpp"
#include "invariants.hpp"
#include "rearrangement.hpp"

namespace pshsym {

/// Everything one `analyze` run produces for a single function.
struct AnalysisResult {
  FunctionSpec spec;
  std::optional<Expected> expected;
  RunConfig config;
  SymmetrizationResult symmetrization;
  InvariantReport invariants;
  TheoremReport theorems;
  EquimeasurabilityReport equimeasurability;
  std::vector<MaConsistencyReport> ma_consistency;  // mollified u-hat, resolutions 0 and 1
  std::string ma_error;

  bool unstable() const { return invariants.any_unstable(); }
};

/// Symmetrization, invariants, theorem checks and the cheap consistency
/// checks. Throws on hard errors (CONVEXITY_VIOLATION, ...).
AnalysisResult run_analysis(const FunctionSpec& spec, const RunConfig& config,
                            const std::optional<Expected>& expected = std::nullopt);

nlohmann::json report_json(const AnalysisResult& a);
nlohmann::json theorems_json(const AnalysisResult& a);
std::string volumes_csv(const AnalysisResult& a);
/// (t, u on the diagonal ray |z_k| = e^t / sqrt(n), u-hat(t)).
std::string profiles_csv(const AnalysisResult& a);
std::string profiles_svg(const AnalysisResult& a);
/// log mu(t) with the line of slope 2 / iota through the deepest level.
std::string volume_svg(const AnalysisResult& a);
std::string summary_markdown(const AnalysisResult& a);

struct ReproduceRow {
  std::string entry;
  std::string quantity;
  double expected;
  double computed;
  double tolerance;
};

std::vector<ReproduceRow> reproduce_rows(const AnalysisResult& a);
/// Expected versus computed values for entries with catalog ground truth.
std::string reproduce_markdown(std::span<const AnalysisResult* const> results);
/// One row per entry and check status.
std::string verify_markdown(std::span<const AnalysisResult* const> results);

}  // namespace pshsym
