#include <doctest.h>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "llab/errors.hpp"
#include "llab/lawcheck.hpp"
#include "llab/potential.hpp"

using namespace llab;

namespace {

struct Fixture {
  TorusGrid grid;
  Spectrum spectrum;
  LandscapeField landscape;
  CountingCurve curve_N;
};

Fixture uniform_fixture(int R0, int n, std::uint64_t seed,
                        std::vector<double> mu) {
  const TorusGrid g(1, R0, n);
  DiscreteOperator op(assemble_anderson(
      g, sample_omegas(DistributionSpec::uniform01(), site_count(g), seed, 0)));
  Spectrum spec = op.eigen_dense();
  LandscapeField u = solve_landscape(op);
  CountingCurve N = ids_curve(spec, mu, g);
  return Fixture{g, std::move(spec), std::move(u), std::move(N)};
}

LandscapeField flat_landscape(const TorusGrid& g, double value) {
  return LandscapeField{
      g, std::vector<double>(static_cast<std::size_t>(g.total_points()), value),
      0.0, 0, "{}"};
}

}  // namespace

TEST_CASE("check_upper with the fitted constant passes everywhere") {
  const auto mu = geometric_mu_grid(0.001, 8.0, 16);
  Fixture f = uniform_fixture(32, 8, 5, mu);
  const auto fit =
      fit_constant_upper(f.curve_N, f.landscape, mu.front(), mu.back());
  const auto res =
      check_upper(f.curve_N, f.landscape, fit.C4, mu.front(), mu.back());
  CHECK(res.all_pass);
  CHECK(!res.rows.empty());
  for (const auto& row : res.rows) CHECK(row.slack >= -1e-12);
}

TEST_CASE("a vanishing constant fails the upper bound") {
  const auto mu = geometric_mu_grid(0.01, 8.0, 16);
  Fixture f = uniform_fixture(32, 8, 5, mu);
  const auto res =
      check_upper(f.curve_N, f.landscape, 0.01, mu.front(), mu.back());
  bool any_fail = false;
  for (const auto& row : res.rows) any_fail = any_fail || !row.pass;
  CHECK(any_fail);
  CHECK_FALSE(res.all_pass);
}

TEST_CASE("empty spectral region passes trivially") {
  // V = 1: no eigenvalues below 1, and N_u(C4 mu) = 0 well below the floor
  const TorusGrid g(1, 16, 8);
  DiscreteOperator op(constant_potential(g, 1.0));
  const Spectrum spec = op.eigen_dense();
  const LandscapeField u = solve_landscape(op);
  const auto mu = geometric_mu_grid(0.01, 0.2, 16);
  const CountingCurve N = ids_curve(spec, mu, g);
  const auto res = check_upper(N, u, 1.0, mu.front(), mu.back());
  CHECK(res.all_pass);
  for (const auto& row : res.rows) {
    CHECK(row.lhs == 0.0);
    CHECK(row.rhs == 0.0);
  }
}

TEST_CASE("check_lower_general") {
  const auto mu = geometric_mu_grid(0.5, 50.0, 16);
  Fixture f = uniform_fixture(64, 8, 7, mu);
  const double alpha = 1.0 / 32.0;
  const double C2 = 0.25 * std::pow(alpha, -3.0);  // first scale = mu/4

  SUBCASE("degenerate constants pass") {
    const auto res = check_lower_general(f.curve_N, f.landscape, alpha, 1e-12,
                                         C2, 1.0, mu.front(), mu.back());
    CHECK(res.all_pass);
    CHECK(!res.rows.empty());
  }
  SUBCASE("fitted C1 passes on the fitting sample") {
    const std::pair<const CountingCurve*, const LandscapeField*> sample{
        &f.curve_N, &f.landscape};
    const auto fit =
        fit_lower_C1({&sample, 1}, alpha, C2, 1.0, mu.front(), mu.back(), 0.999);
    CHECK(fit.constrained_rows > 0);
    CHECK(fit.C1 > 0.0);
    const auto res = check_lower_general(f.curve_N, f.landscape, alpha, fit.C1,
                                         C2, 1.0, mu.front(), mu.back());
    CHECK(res.all_pass);
    // a grossly inflated constant must fail somewhere on the same rows
    const auto bad = check_lower_general(f.curve_N, f.landscape, alpha,
                                         fit.C1 * 1e4, C2, 1.0, mu.front(),
                                         mu.back());
    CHECK_FALSE(bad.all_pass);
  }
  SUBCASE("alpha at the threshold is rejected") {
    CHECK_THROWS_AS(check_lower_general(f.curve_N, f.landscape, 0.0625, 1.0,
                                        1.0, 1.0, 0.5, 50.0),
                    InvalidParameters);
  }
  SUBCASE("rows with inadmissible inner scales are excluded and listed") {
    const auto res = check_lower_general(f.curve_N, f.landscape, alpha, 1.0,
                                         1.0, 1.0, mu.front(), mu.back());
    CHECK(res.rows.empty());  // C2 = 1 pushes both scales below the domain
    CHECK(res.excluded.size() == f.curve_N.mu.size());
  }
}

TEST_CASE("clean lower fit brackets the curve") {
  const auto mu = geometric_mu_grid(0.01, 8.0, 16);
  Fixture f = uniform_fixture(32, 8, 11, mu);
  const auto fit =
      fit_constant_lower_clean(f.curve_N, f.landscape, mu.front(), mu.back());
  CHECK(fit.C2_prime > 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double nu_val;
    try {
      nu_val = landscape_count(f.landscape, fit.C2_prime * mu[i]);
    } catch (const Error&) {
      continue;
    }
    CHECK(nu_val <= f.curve_N.value[i] + 1e-9);
  }
}

TEST_CASE("doubling ratio closed form on the flat landscape") {
  for (int d : {1, 2}) {
    const TorusGrid g(d, 8, 8);
    const LandscapeField u = flat_landscape(g, 1.0);
    const std::vector<double> s_values = {0.5, 1.0, 2.0};
    const auto res = check_doubling(u, s_values);
    for (const auto& row : res.rows) {
      const double want = std::pow(2.0, d) / (1.0 + std::pow(row.s, 4.0));
      CHECK(std::abs(row.ratio - want) <= 1e-12);
    }
    // the ratio increases toward 2^d as s shrinks
    const double r_half = res.rows.front().ratio;
    CHECK(r_half < std::pow(2.0, d));
    CHECK(r_half ==
          doctest::Approx(std::pow(2.0, d) / (1.0 + 0.0625)).epsilon(1e-12));
    CHECK(res.C_D_hat == doctest::Approx(r_half).epsilon(1e-12));
  }
}

TEST_CASE("doubling scale guards") {
  const TorusGrid g(1, 4, 8);
  const LandscapeField u = flat_landscape(g, 1.0);
  CHECK_THROWS_AS(check_doubling(u, std::vector<double>{0.01}),
                  CubeUnresolvable);
  CHECK_THROWS_AS(check_doubling(u, std::vector<double>{3.0}),
                  CubeUnresolvable);
}

TEST_CASE("doubling constant is stable under refinement") {
  // smooth periodic potential; C_D_hat should move little from n=8 to n=16
  auto solve_smooth = [](int n) {
    const TorusGrid g(1, 8, n);
    std::vector<double> v(static_cast<std::size_t>(g.total_points()));
    for (std::int64_t i = 0; i < g.total_points(); ++i)
      v[static_cast<std::size_t>(i)] =
          0.6 + 0.4 * std::cos(2.0 * std::numbers::pi * i * (1.0 / n) / 8.0);
    DiscreteOperator op(PotentialField{g, std::move(v), {}, "{}"});
    return solve_landscape(op);
  };
  const std::vector<double> s_values = {0.5, 1.0};
  const double coarse = check_doubling(solve_smooth(8), s_values).C_D_hat;
  const double fine = check_doubling(solve_smooth(16), s_values).C_D_hat;
  CHECK(std::abs(fine - coarse) / coarse <= 0.10);
}

TEST_CASE("minima ratio diagnostic") {
  SUBCASE("flat landscape ground state") {
    for (int d : {1, 2}) {
      const TorusGrid g(d, 4, 4);
      const double c = 0.7;
      DiscreteOperator op(constant_potential(g, c));
      const Spectrum spec = op.eigen_dense();
      const LandscapeField u = solve_landscape(op);
      const auto rows = minima_ratio_diagnostic(spec, u, 1);
      REQUIRE(rows.size() == 1);
      CHECK(rows[0].minimum == doctest::Approx(c).epsilon(1e-9));
      CHECK(rows[0].eigenvalue == doctest::Approx(c).epsilon(1e-9));
      CHECK(rows[0].ratio ==
            doctest::Approx(1.0 / (1.0 + 0.25 * d)).epsilon(1e-8));
    }
  }
  SUBCASE("requesting too many rows fails") {
    const TorusGrid g(1, 4, 4);
    DiscreteOperator op(constant_potential(g, 1.0));
    const Spectrum spec = op.eigen_dense();
    const LandscapeField u = solve_landscape(op);
    // the flat landscape has exactly one plateau minimum
    CHECK_THROWS_AS(minima_ratio_diagnostic(spec, u, 2), InsufficientMinima);
  }
}

TEST_CASE("moser-harnack probe closed forms") {
  SUBCASE("unit landscape, unit cubes") {
    const TorusGrid g(1, 8, 8);
    const LandscapeField u = flat_landscape(g, 1.0);
    const double c_h = moser_harnack_probe(u, partition(g, 1.0));
    CHECK(c_h == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("large constant landscape approaches 1") {
    const TorusGrid g(1, 8, 8);
    const LandscapeField u = flat_landscape(g, 1000.0);
    const double c_h = moser_harnack_probe(u, partition(g, 1.0));
    CHECK(c_h == doctest::Approx(1000.0 / 1001.0).epsilon(1e-12));
  }
  SUBCASE("anderson fixture is finite and refinement-stable") {
    auto probe = [](int n) {
      const TorusGrid g(1, 16, n);
      DiscreteOperator op(assemble_anderson(
          g, sample_omegas(DistributionSpec::uniform01(), 16, 3, 0)));
      const LandscapeField u = solve_landscape(op);
      return moser_harnack_probe(u, partition(g, 1.0));
    };
    const double coarse = probe(8);
    const double fine = probe(16);
    CHECK(coarse > 0.0);
    CHECK(std::isfinite(coarse));
    CHECK(std::abs(fine - coarse) / coarse <= 0.10);
  }
}

TEST_CASE("law reports are deterministic") {
  auto make_report = [] {
    const auto mu = geometric_mu_grid(0.01, 4.0, 8);
    Fixture f = uniform_fixture(16, 8, 21, mu);
    LawReport r;
    const auto fit =
        fit_constant_upper(f.curve_N, f.landscape, mu.front(), mu.back());
    r.upper = check_upper(f.curve_N, f.landscape, fit.C4, mu.front(), mu.back());
    r.lower = check_lower_general(f.curve_N, f.landscape, 1.0 / 32, 1.0,
                                  0.25 * std::pow(32.0, 3.0), 1.0, mu.front(),
                                  mu.back());
    r.doubling = check_doubling(f.landscape, std::vector<double>{1.0});
    r.C_H_hat = moser_harnack_probe(f.landscape, partition(f.grid, 1.0));
    r.minima_ratios = minima_ratio_diagnostic(f.spectrum, f.landscape, 2);
    r.potential_sha256 = "x";
    r.config_sha256 = "y";
    return law_report_json(r) + law_report_text(r);
  };
  CHECK(make_report() == make_report());
}
