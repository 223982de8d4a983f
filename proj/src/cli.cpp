#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "llab/errors.hpp"
#include "llab/run_config.hpp"

namespace llab {

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation:
      return 2;
    case ErrorKind::numerical:
      return 3;
    case ErrorKind::io:
      return 4;
  }
  return 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{
      "llab: localization-landscape laboratory for the torus Schrodinger "
      "operator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> out_dir, dist, pot_source, pot_path, mu_kind;
  std::optional<int> dim, R0, n, threads, mu_ppd, mu_points, minima_count;
  std::optional<std::uint64_t> seed, realization, base_seed;
  std::optional<std::int64_t> realizations, dense_limit, max_iter;
  std::optional<double> const_c, tol, mu_min, mu_max, C4, alpha, C1, C2, C3;
  std::optional<std::vector<double>> s_values;
  bool dump_matrix = false;

  const std::vector<std::string> experiments = {
      "gen-potential", "landscape", "spectrum", "curves",
      "lawcheck",      "doubling",  "ensemble", "figure1"};
  for (const auto& name : experiments) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--set", sets,
                    "override any config field, e.g. --set grid.R0=128");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--dim", dim);
    sub->add_option("--R0", R0);
    sub->add_option("--n", n);
    sub->add_option("--source", pot_source, "distribution|constant|file");
    sub->add_option("--dist", dist, "e.g. uniform01, bernoulli(0.5)");
    sub->add_option("--seed", seed);
    sub->add_option("--realization", realization);
    sub->add_option("--const-c", const_c);
    sub->add_option("--potential-file", pot_path);
    sub->add_option("--tol", tol);
    sub->add_option("--max-iterations", max_iter);
    sub->add_option("--mu-kind", mu_kind, "auto|geometric|linear|list");
    sub->add_option("--mu-min", mu_min);
    sub->add_option("--mu-max", mu_max);
    sub->add_option("--mu-ppd", mu_ppd, "geometric points per decade");
    sub->add_option("--mu-points", mu_points, "linear point count");
    sub->add_option("--C4", C4);
    sub->add_option("--alpha", alpha);
    sub->add_option("--C1", C1);
    sub->add_option("--C2", C2);
    sub->add_option("--C3", C3);
    sub->add_option("--minima-count", minima_count);
    sub->add_option("--s", s_values, "doubling scales");
    sub->add_option("--realizations", realizations);
    sub->add_option("--base-seed", base_seed);
    sub->add_option("--dense-dof-limit", dense_limit);
    sub->add_option("--threads", threads);
    sub->add_flag("--dump-matrix", dump_matrix);
  }

  std::vector<const char*> argv;
  argv.push_back("llab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    nlohmann::json j;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open config " + config_path);
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
      }
    } else {
      j = nlohmann::json::object();
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects key.path=value, got '" + s + "'");
      std::string pointer = "/" + s.substr(0, eq);
      for (auto& c : pointer)
        if (c == '.') c = '/';
      nlohmann::json value;
      try {
        value = nlohmann::json::parse(s.substr(eq + 1));
      } catch (const nlohmann::json::exception&) {
        value = s.substr(eq + 1);  // plain string
      }
      j[nlohmann::json::json_pointer(pointer)] = value;
    }

    RunConfig cfg = RunConfig::from_json(j);
    cfg.experiment = app.get_subcommands().front()->get_name();

    // the figure-1 fixture lives on the length-512 interval
    if (cfg.experiment == "figure1" && !R0 &&
        !(j.contains("grid") && j["grid"].contains("R0")))
      cfg.R0 = 512;

    if (out_dir) cfg.output_dir = *out_dir;
    if (dim) cfg.dim = *dim;
    if (R0) cfg.R0 = *R0;
    if (n) cfg.n = *n;
    if (pot_source) cfg.potential.source = *pot_source;
    if (dist) {
      cfg.potential.distribution = *dist;
      if (!pot_source) cfg.potential.source = "distribution";
    }
    if (seed) cfg.potential.seed = *seed;
    if (realization) cfg.potential.realization = *realization;
    if (const_c) {
      cfg.potential.constant_c = *const_c;
      if (!pot_source) cfg.potential.source = "constant";
    }
    if (pot_path) {
      cfg.potential.path = *pot_path;
      if (!pot_source) cfg.potential.source = "file";
    }
    if (tol) cfg.solver_tolerance = *tol;
    if (max_iter) cfg.solver_max_iterations = *max_iter;
    if (mu_kind) cfg.mu.kind = *mu_kind;
    if (mu_min) cfg.mu.min = *mu_min;
    if (mu_max) cfg.mu.max = *mu_max;
    if (mu_ppd) cfg.mu.points_per_decade = *mu_ppd;
    if (mu_points) cfg.mu.points = *mu_points;
    if ((mu_min || mu_max) && cfg.mu.kind == "auto") cfg.mu.kind = "geometric";
    if (C4) cfg.C4 = *C4;
    if (alpha) cfg.alpha = *alpha;
    if (C1) cfg.C1 = *C1;
    if (C2) cfg.C2 = *C2;
    if (C3) cfg.C3 = *C3;
    if (minima_count) cfg.minima_count = *minima_count;
    if (s_values) cfg.doubling_s = *s_values;
    if (realizations) cfg.realizations = *realizations;
    if (base_seed) cfg.base_seed = *base_seed;
    if (dense_limit) cfg.dense_dof_limit = *dense_limit;
    if (threads) cfg.threads = *threads;
    if (dump_matrix) cfg.dump_matrix = true;

    // LLAB_THREADS caps internal parallelism
    if (const char* cap = std::getenv("LLAB_THREADS")) {
      const int limit = std::max(1, std::atoi(cap));
      cfg.threads = std::min(cfg.threads, limit);
    }

    run_experiment(cfg);
    return 0;
  } catch (const Error& e) {
    std::cerr << "llab: error: " << e.what() << '\n';
    return exit_code_for(e.kind);
  } catch (const std::exception& e) {
    std::cerr << "llab: unexpected error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace llab
