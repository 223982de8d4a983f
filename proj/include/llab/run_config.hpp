#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace llab {

struct PotentialSourceConfig {
  std::string source = "distribution";  // distribution | constant | file
  std::string distribution = "uniform01";
  std::uint64_t seed = 1;
  std::uint64_t realization = 0;
  double constant_c = 1.0;
  std::string path;
};

struct MuGridConfig {
  std::string kind = "auto";  // auto | geometric | linear | list
  double min = 0.0;
  double max = 0.0;
  int points_per_decade = 64;
  int points = 0;               // linear kind
  std::vector<double> values;   // list kind
};

// One experiment run: fully validated before any compute; the echo written
// next to the artifacts reproduces the run exactly.
struct RunConfig {
  int schema_version = 1;
  std::string experiment;  // gen-potential landscape spectrum curves lawcheck
                           // doubling ensemble figure1
  int dim = 1;
  int R0 = 64;
  int n = 8;
  PotentialSourceConfig potential;
  MuGridConfig mu;
  double solver_tolerance = 1e-10;
  std::int64_t solver_max_iterations = 0;

  // lawcheck constants; 0 requests the built-in fit (C2: scale heuristic)
  double C4 = 0.0;
  double alpha = 1.0 / 32.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 1.0;
  double C_max = 1e3;
  std::vector<double> doubling_s{0.5, 1.0, 2.0};
  int minima_count = 8;

  std::int64_t realizations = 8;
  std::uint64_t base_seed = 1;

  std::int64_t dense_dof_limit = 4096;
  int threads = 1;
  bool dump_matrix = false;
  std::string output_dir = "out";

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;  // throws ConfigError
  std::string config_sha256() const;
};

void run_experiment(const RunConfig& config);

// Parses argv-style arguments, merges config file and flag overrides, runs
// the experiment. Returns the process exit code: 0 success, 2 validation
// error, 3 numerical failure, 4 I/O error.
int cli_main(const std::vector<std::string>& args);

}  // namespace llab
