#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "llab/counting.hpp"
#include "llab/errors.hpp"
#include "llab/field_io.hpp"
#include "llab/landscape.hpp"
#include "llab/potential.hpp"
#include "llab/run_config.hpp"

using namespace llab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("curves run matches module-level outputs") {
  const fs::path dir = fresh_dir("llab_cli_curves");
  RunConfig cfg;
  cfg.experiment = "curves";
  cfg.dim = 1;
  cfg.R0 = 16;
  cfg.n = 8;
  cfg.potential.source = "constant";
  cfg.potential.constant_c = 1.0;
  cfg.mu.kind = "geometric";
  cfg.mu.min = 1.0 / 128.0;
  cfg.mu.max = 4.0;
  cfg.mu.points_per_decade = 8;
  cfg.output_dir = (dir / "run").string();
  run_experiment(cfg);

  // recompute through the modules
  const TorusGrid g(1, 16, 8);
  DiscreteOperator op(constant_potential(g, 1.0));
  const Spectrum spec = op.eigen_dense();
  const LandscapeField u = solve_landscape(op);
  const std::vector<double> W = effective_potential(u);
  const auto mu = geometric_mu_grid(cfg.mu.min, cfg.mu.max, 8);

  std::ifstream in(dir / "run" / "curves.csv");
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# config_sha256 ", 0) == 0);
  std::getline(in, line);
  CHECK(line == "mu,N,N_u,N_V,N_W");
  std::size_t i = 0;
  while (std::getline(in, line)) {
    REQUIRE(i < mu.size());
    std::stringstream row(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(row, cell, ',')) cols.push_back(std::stod(cell));
    REQUIRE(cols.size() == 5);
    CHECK(cols[0] == doctest::Approx(mu[i]).epsilon(1e-16));
    CHECK(cols[1] ==
          static_cast<double>(spec.count_below(mu[i])) / g.volume());
    CHECK(cols[2] == landscape_count(u, mu[i]));
    CHECK(cols[3] == doctest::Approx(weyl_predictor(op.potential(), g, mu[i]))
                         .epsilon(1e-16));
    CHECK(cols[4] ==
          doctest::Approx(weyl_predictor(W, g, mu[i])).epsilon(1e-16));
    ++i;
  }
  CHECK(i == mu.size());

  // artifacts carry the config hash and load back with valid checksums
  const FieldRecord pot = load_field(dir / "run" / "potential.fld");
  CHECK(pot.kind == "potential");
  const FieldRecord land = load_field(dir / "run" / "landscape.fld");
  const auto prov = nlohmann::json::parse(land.provenance);
  CHECK(prov.at("potential_sha256").get<std::string>() == payload_sha256(pot));
  CHECK(prov.at("config_sha256").get<std::string>() == cfg.config_sha256());
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  const fs::path dir = fresh_dir("llab_cli_determinism");
  RunConfig cfg;
  cfg.experiment = "curves";
  cfg.dim = 1;
  cfg.R0 = 16;
  cfg.n = 8;
  cfg.potential.source = "distribution";
  cfg.potential.distribution = "uniform01";
  cfg.potential.seed = 7;
  cfg.mu.kind = "geometric";
  cfg.mu.min = 0.01;
  cfg.mu.max = 4.0;
  cfg.mu.points_per_decade = 8;
  cfg.output_dir = (dir / "run").string();

  run_experiment(cfg);
  const std::string first_curves = slurp(dir / "run" / "curves.csv");
  const std::string first_echo = slurp(dir / "run" / "config_echo.json");
  const std::string first_pot = slurp(dir / "run" / "potential.fld");

  run_experiment(cfg);
  CHECK(slurp(dir / "run" / "curves.csv") == first_curves);
  CHECK(slurp(dir / "run" / "config_echo.json") == first_echo);
  CHECK(slurp(dir / "run" / "potential.fld") == first_pot);
}

TEST_CASE("validation rejects an out-of-domain mu grid before compute") {
  RunConfig cfg;
  cfg.experiment = "curves";
  cfg.dim = 1;
  cfg.R0 = 16;
  cfg.n = 8;
  cfg.mu.kind = "geometric";
  cfg.mu.min = 1e-4;  // R0 sqrt(mu) = 0.16 < 1
  cfg.mu.max = 4.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = fresh_dir("llab_cli_exit");

  SUBCASE("success") {
    CHECK(cli_main({"gen-potential", "--dim", "1", "--R0", "4", "--n", "16",
                    "--dist", "uniform01", "--seed", "3", "--out",
                    (dir / "ok").string()}) == 0);
    CHECK(fs::exists(dir / "ok" / "potential.fld"));
    CHECK(fs::exists(dir / "ok" / "config_echo.json"));
  }
  SUBCASE("validation error is exit 2") {
    CHECK(cli_main({"curves", "--dim", "1", "--R0", "16", "--n", "8",
                    "--const-c", "1", "--mu-min", "1e-4", "--mu-max", "4",
                    "--out", (dir / "bad").string()}) == 2);
    CHECK(cli_main({"figure1", "--dim", "2", "--out", (dir / "f").string()}) ==
          2);
  }
  SUBCASE("numerical failure is exit 3") {
    CHECK(cli_main({"landscape", "--dim", "1", "--R0", "16", "--n", "8",
                    "--dist", "uniform01", "--tol", "1e-14",
                    "--max-iterations", "2", "--out",
                    (dir / "nc").string()}) == 3);
    // V = 0 makes Lu = 1 unsolvable on the torus
    CHECK(cli_main({"landscape", "--dim", "1", "--R0", "16", "--n", "8",
                    "--const-c", "0", "--out", (dir / "sing").string()}) == 3);
  }
  SUBCASE("io error is exit 4") {
    CHECK(cli_main({"curves", "--config", (dir / "missing.json").string()}) ==
          4);
  }
  SUBCASE("config file with flag override") {
    const fs::path cfg_path = dir / "cfg.json";
    {
      std::ofstream out(cfg_path);
      out << R"({"grid":{"dim":1,"R0":4,"n":16},)"
          << R"("potential":{"source":"constant","constant_c":2.0}})";
    }
    CHECK(cli_main({"gen-potential", "--config", cfg_path.string(), "--set",
                    "grid.R0=8", "--out", (dir / "merged").string()}) == 0);
    const auto echo = nlohmann::json::parse(
        slurp(dir / "merged" / "config_echo.json"));
    CHECK(echo.at("grid").at("R0").get<int>() == 8);  // flag wins, echo merged
    const FieldRecord rec = load_field(dir / "merged" / "potential.fld");
    CHECK(rec.R0 == 8);
    CHECK(rec.values == std::vector<double>(8 * 16, 2.0));
  }
}

TEST_CASE("landscape run consumes a generated potential file") {
  const fs::path dir = fresh_dir("llab_cli_chain");
  REQUIRE(cli_main({"gen-potential", "--dim", "1", "--R0", "8", "--n", "16",
                    "--dist", "bernoulli(0.5)", "--seed", "11", "--out",
                    (dir / "gen").string()}) == 0);
  REQUIRE(cli_main({"landscape", "--potential-file",
                    (dir / "gen" / "potential.fld").string(), "--out",
                    (dir / "land").string()}) == 0);
  const FieldRecord pot = load_field(dir / "gen" / "potential.fld");
  const FieldRecord land = load_field(dir / "land" / "landscape.fld");
  CHECK(land.kind == "landscape");
  const auto prov = nlohmann::json::parse(land.provenance);
  CHECK(prov.at("potential_sha256").get<std::string>() == payload_sha256(pot));
  CHECK(prov.at("residual").get<double>() <= 1e-10);
}

TEST_CASE("spectrum run emits the matrix dump on request") {
  const fs::path dir = fresh_dir("llab_cli_spectrum");
  REQUIRE(cli_main({"spectrum", "--dim", "1", "--R0", "4", "--n", "2",
                    "--const-c", "0.5", "--dump-matrix", "--out",
                    (dir / "s").string()}) == 0);
  const std::string spectrum = slurp(dir / "s" / "spectrum.csv");
  CHECK(spectrum.find("index,eigenvalue") != std::string::npos);
  const std::string matrix = slurp(dir / "s" / "matrix.txt");
  // 8 diagonal entries plus 16 neighbour entries
  std::int64_t lines = 0;
  for (char c : matrix) lines += c == '\n';
  CHECK(lines == 25);  // 24 entries + hash comment
}

TEST_CASE("lawcheck and doubling runs emit reports") {
  const fs::path dir = fresh_dir("llab_cli_lawcheck");
  REQUIRE(cli_main({"lawcheck", "--dim", "1", "--R0", "16", "--n", "8",
                    "--dist", "uniform01", "--seed", "5", "--mu-min", "0.01",
                    "--mu-max", "4", "--mu-ppd", "8", "--s", "0.5", "--s", "1",
                    "--minima-count", "3", "--out", (dir / "law").string()}) ==
          0);
  const auto report =
      nlohmann::json::parse(slurp(dir / "law" / "lawreport.json"));
  CHECK(report.at("upper").at("all_pass").get<bool>());
  CHECK(report.at("lower").at("all_pass").get<bool>());
  CHECK(report.at("doubling").at("C_D_hat").get<double>() > 0.0);
  CHECK(report.at("minima_ratios").size() == 3);

  REQUIRE(cli_main({"doubling", "--dim", "1", "--R0", "16", "--n", "8",
                    "--dist", "uniform01", "--seed", "5", "--s", "1", "--out",
                    (dir / "dbl").string()}) == 0);
  const auto dbl = nlohmann::json::parse(slurp(dir / "dbl" / "doubling.json"));
  CHECK(dbl.at("C_D_hat").get<double>() > 0.0);
}

TEST_CASE("ensemble run emits curves and a json report") {
  const fs::path dir = fresh_dir("llab_cli_ensemble");
  REQUIRE(cli_main({"ensemble", "--dim", "1", "--R0", "16", "--n", "8",
                    "--dist", "uniform01", "--base-seed", "3",
                    "--realizations", "4", "--mu-min", "0.01", "--mu-max", "4",
                    "--mu-ppd", "8", "--out", (dir / "ens").string()}) == 0);
  const auto report =
      nlohmann::json::parse(slurp(dir / "ens" / "ensemble.json"));
  CHECK(report.at("realization_checksums").size() == 4);
  CHECK(report.at("N_u").at("mean").size() ==
        report.at("N_u").at("mu").size());
  CHECK(report.at("config").at("ensemble").at("realizations").get<int>() == 4);
  CHECK(report.contains("envelope_fit_Nu"));
  const std::string csv = slurp(dir / "ens" / "ensemble_Nu.csv");
  CHECK(csv.find("mu,value,stderr") != std::string::npos);
}
