#pragma once

#include "isodiam/verify.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace isodiam {

/// One experiment: {id, kind, reference, backend, seed, params}.
/// kind is verify, optimize, obstacle, catalog or scan.
struct ExperimentConfig {
  std::string id;
  std::string kind;
  std::string reference;
  nlohmann::json backend;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();
  std::filesystem::path base_dir = ".";

  /// Validates the top level; params are validated when the experiment runs.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
  /// Unreadable files and malformed JSON raise ConfigInvalid.
  static ExperimentConfig load(const std::filesystem::path& path);
};

struct Assertion {
  std::string name;
  double value = 0.0;
  std::string requirement;
  bool pass = false;
};

struct ExperimentResult {
  std::string id, kind, reference;
  std::uint64_t seed = 0;
  bool pass = false;
  std::vector<Assertion> assertions;
  std::vector<VerificationReport> reports;
  nlohmann::json data = nlohmann::json::object();
  std::vector<std::string> artifacts;  // file names relative to the output directory

  nlohmann::json to_json() const;
};

struct RunOptions {
  std::filesystem::path out = "results";
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;  // multiplies every tolerance in params
};

/// Polygon from {"shape": regular_polygon | ellipse | metric_circle | polygon, ...}.
Region region_from_spec(const BackendPtr& m, const nlohmann::json& spec, int n_override = 0);

/// Runs the experiment and writes <id>.json plus its CSV artifacts into opts.out.
/// Throws ConfigInvalid for bad params; other errors mean the experiment failed.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct SuiteEntry {
  std::filesystem::path config;
  std::string id, kind, reference;
  bool pass = false;
  int exit_code = 0;  // 0 pass, 1 failed, 2 invalid config
  std::string error;
  double seconds = 0.0;
};

/// All *.json configs under `dir` whose file name, id or kind contains `filter`,
/// run on `jobs` worker threads; entries come back in file-name order.
std::vector<SuiteEntry> run_suite(const std::filesystem::path& dir, const std::string& filter, const RunOptions& opts,
                                  int jobs);

/// id, kind, reference, pass, exit_code; no timings, so reruns are byte-identical.
void write_summary_csv(const std::vector<SuiteEntry>& entries, const std::filesystem::path& path);

}  // namespace isodiam
