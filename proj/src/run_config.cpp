#include "llab/run_config.hpp"

#include <cmath>
#include <set>

#include "llab/errors.hpp"
#include "llab/field_io.hpp"
#include "llab/potential.hpp"

namespace llab {

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

const std::set<std::string> kExperiments = {
    "gen-potential", "landscape", "spectrum", "curves",
    "lawcheck",      "doubling",  "ensemble", "figure1"};

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  maybe(j, "schema_version", c.schema_version);
  maybe(j, "experiment", c.experiment);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    maybe(g, "dim", c.dim);
    maybe(g, "R0", c.R0);
    maybe(g, "n", c.n);
  }
  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    maybe(p, "source", c.potential.source);
    maybe(p, "distribution", c.potential.distribution);
    maybe(p, "seed", c.potential.seed);
    maybe(p, "realization", c.potential.realization);
    maybe(p, "constant_c", c.potential.constant_c);
    maybe(p, "path", c.potential.path);
  }
  if (j.contains("mu")) {
    const auto& m = j.at("mu");
    maybe(m, "kind", c.mu.kind);
    maybe(m, "min", c.mu.min);
    maybe(m, "max", c.mu.max);
    maybe(m, "points_per_decade", c.mu.points_per_decade);
    maybe(m, "points", c.mu.points);
    maybe(m, "values", c.mu.values);
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    maybe(s, "tolerance", c.solver_tolerance);
    maybe(s, "max_iterations", c.solver_max_iterations);
  }
  if (j.contains("law")) {
    const auto& l = j.at("law");
    maybe(l, "C4", c.C4);
    maybe(l, "alpha", c.alpha);
    maybe(l, "C1", c.C1);
    maybe(l, "C2", c.C2);
    maybe(l, "C3", c.C3);
    maybe(l, "C_max", c.C_max);
    maybe(l, "minima_count", c.minima_count);
  }
  if (j.contains("doubling")) {
    const auto& d = j.at("doubling");
    maybe(d, "s_values", c.doubling_s);
  }
  if (j.contains("ensemble")) {
    const auto& e = j.at("ensemble");
    maybe(e, "realizations", c.realizations);
    maybe(e, "base_seed", c.base_seed);
  }
  maybe(j, "dense_dof_limit", c.dense_dof_limit);
  maybe(j, "threads", c.threads);
  maybe(j, "dump_matrix", c.dump_matrix);
  maybe(j, "output_dir", c.output_dir);
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["experiment"] = experiment;
  j["grid"] = {{"dim", dim}, {"R0", R0}, {"n", n}};
  j["potential"] = {{"source", potential.source},
                    {"distribution", potential.distribution},
                    {"seed", potential.seed},
                    {"realization", potential.realization},
                    {"constant_c", potential.constant_c},
                    {"path", potential.path}};
  j["mu"] = {{"kind", mu.kind},
             {"min", mu.min},
             {"max", mu.max},
             {"points_per_decade", mu.points_per_decade},
             {"points", mu.points},
             {"values", mu.values}};
  j["solver"] = {{"tolerance", solver_tolerance},
                 {"max_iterations", solver_max_iterations}};
  j["law"] = {{"C4", C4},   {"alpha", alpha}, {"C1", C1},
              {"C2", C2},   {"C3", C3},       {"C_max", C_max},
              {"minima_count", minima_count}};
  j["doubling"] = {{"s_values", doubling_s}};
  j["ensemble"] = {{"realizations", realizations}, {"base_seed", base_seed}};
  j["dense_dof_limit"] = dense_dof_limit;
  j["threads"] = threads;
  j["dump_matrix"] = dump_matrix;
  j["output_dir"] = output_dir;
  return j;
}

std::string RunConfig::config_sha256() const {
  return sha256_hex(to_json().dump());
}

void RunConfig::validate() const {
  if (schema_version != 1)
    throw ConfigError("unsupported schema_version " +
                      std::to_string(schema_version));
  if (!kExperiments.count(experiment))
    throw ConfigError("unknown experiment '" + experiment + "'");
  if (dim < 1 || dim > 3) throw ConfigError("grid.dim must be 1, 2 or 3");
  if (R0 < 1) throw ConfigError("grid.R0 must be a positive integer");
  if (n < 2) throw ConfigError("grid.n must be >= 2");

  if (potential.source == "distribution") {
    DistributionSpec::parse(potential.distribution);  // throws when malformed
  } else if (potential.source == "constant") {
    if (!(potential.constant_c >= 0.0))
      throw ConfigError("potential.constant_c must be >= 0");
  } else if (potential.source == "file") {
    if (potential.path.empty())
      throw ConfigError("potential.source=file needs potential.path");
  } else {
    throw ConfigError("potential.source must be distribution, constant or file");
  }

  if (mu.kind != "auto" && mu.kind != "geometric" && mu.kind != "linear" &&
      mu.kind != "list")
    throw ConfigError("mu.kind must be auto, geometric, linear or list");
  if (mu.kind == "geometric" && !(mu.min > 0.0 && mu.max > mu.min))
    throw ConfigError("geometric mu grid requires 0 < min < max");
  if (mu.kind == "linear" && !(mu.max > mu.min && mu.points >= 2))
    throw ConfigError("linear mu grid requires min < max and points >= 2");
  if (mu.kind == "list") {
    if (mu.values.empty()) throw ConfigError("mu.values is empty");
    if (!std::is_sorted(mu.values.begin(), mu.values.end()))
      throw ConfigError("mu.values must be ascending");
  }

  const bool needs_landscape_counts = experiment == "curves" ||
                                      experiment == "lawcheck" ||
                                      experiment == "ensemble";
  if (needs_landscape_counts && mu.kind != "auto") {
    const double mu_min =
        mu.kind == "list" ? mu.values.front() : mu.min;
    const double mu_max =
        mu.kind == "list" ? mu.values.back() : mu.max;
    if (!(mu_min > 0.0)) throw ConfigError("mu grid must be positive");
    if (R0 * std::sqrt(mu_min) < 1.0)
      throw ConfigError(
          "R0*sqrt(mu_min) < 1: the counting cube would exceed the domain");
    if (std::floor(R0 * std::sqrt(mu_max)) > static_cast<double>(R0) * n)
      throw ConfigError(
          "mu_max is unresolvable: the counting cube would be smaller than "
          "one grid cell");
  }

  const bool needs_dense = experiment == "spectrum" || experiment == "curves" ||
                           experiment == "lawcheck" ||
                           experiment == "ensemble" || experiment == "figure1";
  if (needs_dense) {
    std::int64_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::int64_t>(R0) * n;
    if (total > dense_dof_limit)
      throw ConfigError("grid has " + std::to_string(total) +
                        " points, dense_dof_limit is " +
                        std::to_string(dense_dof_limit));
  }

  if (experiment == "figure1") {
    if (dim != 1 || R0 != 512)
      throw ConfigError("figure1 requires dim=1 and R0=512");
    if (potential.source != "distribution" ||
        potential.distribution != "uniform01")
      throw ConfigError("figure1 requires the uniform01 potential");
  }

  if (experiment == "ensemble" && realizations < 1)
    throw ConfigError("ensemble.realizations must be >= 1");
  if (experiment == "doubling") {
    if (doubling_s.empty()) throw ConfigError("doubling.s_values is empty");
    for (double s : doubling_s) {
      if (!(s > 0.0)) throw ConfigError("doubling scales must be positive");
      if (std::llround(s * n) < 1)
        throw ConfigError("doubling scale below one grid cell");
      if (2.0 * s > R0) throw ConfigError("doubled cube exceeds the domain");
    }
  }
  if (experiment == "lawcheck" && !(alpha > 0.0 && alpha < 0.0625))
    throw ConfigError("law.alpha must lie in (0, 2^-4)");
  if (!(solver_tolerance > 0.0))
    throw ConfigError("solver.tolerance must be positive");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

}  // namespace llab
