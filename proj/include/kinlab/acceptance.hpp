#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace kinlab::acceptance {

/// `full` is the acceptance binary; `reduced` is what verify-all runs.
enum class Scale { full, reduced };

struct SuiteConfig {
  Scale scale = Scale::full;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Scratch space for the in-process determinism runs; empty picks a
  /// directory under the system temp path.
  std::filesystem::path scratch;
};

struct Criterion {
  std::string id;
  std::string title;
  double budget_seconds = 0.0;
};

struct CriterionResult {
  std::string id;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

const std::vector<Criterion>& criteria();

CriterionResult run_criterion(const std::string& id, const SuiteConfig& config);

/// Every criterion in order; `on_result` sees each result as it completes.
std::vector<CriterionResult> run_all(const SuiteConfig& config,
                                     const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS <id> [<seconds> s] <detail>" or "FAIL ...".
std::string format_line(const CriterionResult& r);

/// Commands and configs used by the determinism criterion and written by
/// verify-all; each runs into its own subdirectory.
struct DataProduct {
  std::string command;
  std::string config_json;  // overrides of the command defaults
};
std::vector<DataProduct> data_products(Scale scale);

/// Runs every data product into out_dir/<index>-<command>/.
void write_data_products(const std::filesystem::path& out_dir, Scale scale, std::uint64_t seed, int workers);

/// First mismatch between two output trees ("" when identical). Manifests
/// are compared without their run-specific keys.
std::string compare_output_trees(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace kinlab::acceptance
