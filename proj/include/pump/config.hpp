#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "pump/index.hpp"
#include "pump/pumps.hpp"

namespace pump {

// Config-driven experiment description. See README for the schema; errors
// carry JSON-pointer-style locations and map to exit code 2 in the CLI.
struct ExperimentConfig {
  nlohmann::json raw;
  std::string task;  // index | split | gap | sweep | verify
  unsigned seed = 1;
  SymmetryGroup group;
  GeometryPtr geom;
  LoopSpec loop;
  EvolveOptions evolve;
  IndexSettings index;
  // sweep
  DeformationFamily sweep_family = DeformationFamily::Dress;
  std::vector<double> sweep_strengths;
  Interaction sweep_generator;
  // split
  int split_edge = 0;
  int split_samples = 16;
  // gap
  std::vector<int> gap_sizes;
  int gap_num_disorder = 20;
  double gap_w_fnorm = 0.05;
  // verify
  std::string suite = "core";
  std::string out_path;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& pointer, const std::string& message)
      : std::runtime_error(pointer + ": " + message), pointer(pointer) {}
  std::string pointer;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// FNV-1a of the canonical serialization; embedded in every report.
std::string config_hash(const nlohmann::json& j);

extern const char* kToolVersion;

// Executes the configured task and returns the report (also written to
// out_path when set). Numerical failures raise std::runtime_error (exit 3).
nlohmann::json run_experiment(const ExperimentConfig& cfg);

nlohmann::json index_report_json(const IndexReport& rep);

}  // namespace pump
