#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cplab {

inline constexpr const char* kVersion = "cplab 0.1.0";

// Thrown on configuration problems; the CLI maps it to exit code 2
// (runtime failures exit 3).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;  // theta-curve | tail | tv-gap | osss-check | russo-check |
                           // revealment | renorm-independence | renorm-tail
  int d = 2;
  std::vector<double> lambdas = {0.5};
  std::vector<int> ns;     // n list; single-n experiments use ns[0]
  int k = 0;               // osss-check / revealment
  double alpha = 0.5;
  double epsilon = 0.0;    // 0 = default n^alpha / 8
  int capN = 0;            // renorm block scale N
  long replicas = 1000;
  std::uint64_t masterSeed = 1;
  int workers = 0;         // 0 = available parallelism
  std::string outputPath = "results.csv";

  // experiment-specific extras (JSON config keys)
  std::vector<int> sizes;        // tail / renorm-tail; default 1..12
  double refMultiplier = 2.0;    // tv-gap reference radius multiplier
  double h = 0.05;               // russo-check finite-difference half-step
  int boxRadius = 0;             // tail / renorm-tail; 0 = derived default
  std::vector<int> separation;   // renorm-independence block index w (v = 0)
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

// Fills derived defaults (epsilon, sizes, boxRadius, workers, ...) and
// throws ValidationError on any contract violation.
ExperimentConfig resolveConfig(const ExperimentConfig& raw);

struct ExperimentOutput {
  std::string csv;           // header + rows; last column is wall_time_ms
  nlohmann::json sidecar;    // resolved config + version + derived gamma
};

// Runs the configured experiment; deterministic in (config, masterSeed)
// aside from the wall-time column.
ExperimentOutput runExperimentInMemory(const ExperimentConfig& config);

// Writes outputPath (CSV) and outputPath + ".json" (sidecar).
void runExperiment(const ExperimentConfig& config);

// CSV body with the wall-time column blanked; what determinism tests compare.
std::string csvWithoutWallTime(const std::string& csv);

}  // namespace cplab
