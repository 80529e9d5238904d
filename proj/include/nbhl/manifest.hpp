#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nbhl/eval.hpp"

namespace nbhl {

// Acceptance band for one experiment: either a minimum, or a center with a
// symmetric tolerance.
struct AcceptBand {
  std::optional<double> min;
  std::optional<double> center;
  std::optional<double> tol;

  bool contains(double accuracy) const;
  std::string describe() const;
};

struct ExperimentOutcome {
  std::string name;
  std::optional<EvalReport> report;  // empty on failure
  std::string error;                 // populated on failure
  std::optional<AcceptBand> band;
  bool band_ok = true;  // false when the band is violated or the run failed

  bool ok() const { return error.empty() && band_ok; }
};

struct SuiteResult {
  std::string manifest_name;
  std::uint64_t master_seed = 0;
  std::vector<ExperimentOutcome> outcomes;

  bool all_ok() const;
};

// Parses a JSON manifest into experiment configs. CSV paths resolve relative
// to the manifest's directory. Per-experiment seeds derive from the manifest
// master seed and the experiment index.
std::vector<ExperimentConfig> load_manifest(const std::filesystem::path& path,
                                            std::vector<std::optional<AcceptBand>>* bands = nullptr,
                                            std::uint64_t* master_seed = nullptr);

// Runs every experiment in order. A missing dataset file fails that
// experiment and the suite continues.
SuiteResult run_experiment_suite(const std::filesystem::path& manifest_path);

// Canonical machine-readable report; deterministic byte-for-byte for a fixed
// manifest and master seed (timings are deliberately excluded).
std::string suite_report_json(const SuiteResult& result);

// Aligned human-readable summary table (includes wall-clock).
std::string suite_summary_table(const SuiteResult& result);

}  // namespace nbhl
