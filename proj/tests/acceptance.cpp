// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Regression baselines (upper/lower law constants) were frozen from
// the pilot run recorded below; LLAB_ACCEPTANCE_PILOT=1 re-prints the fitted
// values instead of asserting against the baselines.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "llab/counting.hpp"
#include "llab/discrete_operator.hpp"
#include "llab/errors.hpp"
#include "llab/landscape.hpp"
#include "llab/lawcheck.hpp"
#include "llab/potential.hpp"
#include "llab/stochastic.hpp"

using namespace llab;

namespace {

// ---- frozen regression baselines (pilot: 20 seeds, 1D uniform01, R0=64,
// ---- n=8, mu in [2.44e-4, 50], 64 points/decade) ----
// pilot max C4_hat was 1.0 exactly (the bound already holds at C4 = 1 on
// every realization); the baseline carries the fitter's 1e-3 resolution
constexpr double kUpperC4Bound = 1.002;
constexpr double kLowerAlpha = 1.0 / 32.0;
// pilot fit gave C1 = 19.17 over 2180 constrained rows; frozen below that
// for eigensolver headroom near the binding row
constexpr double kLowerC1 = 18.0;
constexpr double kLowerC2 = 8192.0;  // 0.25 * alpha^{-(d+2)} for d = 1
constexpr double kLowerC3 = 1.0;

bool g_pilot = false;
int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

void report(int id, const char* label, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %d: %s (%s) [%.1f s]\n", pass ? "PASS" : "FAIL",
              id, label, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

PotentialField anderson(const TorusGrid& g, const DistributionSpec& dist,
                        std::uint64_t seed) {
  return assemble_anderson(g, sample_omegas(dist, site_count(g), seed, 0));
}

struct Fixture {
  TorusGrid grid;
  PotentialField potential;
  LandscapeField landscape;
};

std::vector<Fixture> anderson_fixtures(double tolerance) {
  std::vector<Fixture> out;
  SolveOptions opt;
  opt.tolerance = tolerance;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TorusGrid g(1, 64, 8);
    PotentialField v = anderson(g, DistributionSpec::uniform01(), seed);
    DiscreteOperator op(v);
    out.push_back(Fixture{g, std::move(v), solve_landscape(op, opt)});
  }
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const TorusGrid g(2, 16, 4);
    PotentialField v = anderson(g, DistributionSpec::uniform01(), seed);
    DiscreteOperator op(v);
    out.push_back(Fixture{g, std::move(v), solve_landscape(op, opt)});
  }
  return out;
}

void criterion_1() {
  Timer total;
  bool pass = true;
  double worst = 0.0, worst_time = 0.0;
  for (int d : {1, 2}) {
    for (double c : {0.25, 1.0, 4.0}) {
      Timer t;
      const TorusGrid g(d, d == 1 ? 64 : 16, d == 1 ? 8 : 4);
      DiscreteOperator op(constant_potential(g, c));
      const LandscapeField u = solve_landscape(op);
      double err = 0.0;
      for (double v : u.u) err = std::max(err, std::abs(v - 1.0 / c) * c);
      worst = std::max(worst, err);
      worst_time = std::max(worst_time, t.seconds());
      pass = pass && err <= 1e-8 && t.seconds() < 5.0;
    }
  }
  report(1, "analytic landscape for constant potentials", pass,
         fmt("max rel err %.2e, slowest case %.2f s", worst, worst_time),
         total.seconds());
}

void criterion_2() {
  Timer total;
  bool pass = true;
  double worst = 0.0;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (const Fixture& f : anderson_fixtures(1e-10)) {
    DiscreteOperator op(f.potential);
    std::vector<double> test_f(static_cast<std::size_t>(f.grid.total_points()));
    for (int rep = 0; rep < 100; ++rep) {
      for (auto& x : test_f) x = dist(gen);
      const double r = ground_state_identity_residual(op, f.landscape, test_f);
      worst = std::max(worst, r);
      pass = pass && r <= 1e-6;
    }
  }
  pass = pass && total.seconds() < 60.0;
  report(2, "discrete ground-state identity on random f", pass,
         fmt("max residual %.2e over 800 draws", worst), total.seconds());
}

void criterion_3() {
  Timer total;
  bool pass = true;
  double worst = 0.0;
  auto check = [&](const TorusGrid& g, const PotentialField& v) {
    DiscreteOperator op(v);
    const Spectrum spec = op.eigen_dense();
    double trace = 0.0;
    for (double l : spec.eigenvalues) trace += l;
    double v_sum = 0.0;
    for (double x : v.values) v_sum += x;
    const double inv_h2 =
        static_cast<double>(g.points_per_unit()) * g.points_per_unit();
    const double expected =
        2.0 * g.dim() * inv_h2 * static_cast<double>(g.total_points()) + v_sum;
    const double rel = std::abs(trace - expected) / expected;
    worst = std::max(worst, rel);
    pass = pass && rel <= 1e-9;
  };
  for (int d : {1, 2})
    for (double c : {0.25, 1.0, 4.0}) {
      const TorusGrid g(d, d == 1 ? 64 : 16, d == 1 ? 8 : 4);
      check(g, constant_potential(g, c));
    }
  for (const Fixture& f : anderson_fixtures(1e-10)) check(f.grid, f.potential);
  report(3, "trace identity on all fixtures", pass,
         fmt("max rel deviation %.2e", worst), total.seconds());
}

void criterion_4() {
  Timer total;
  bool pass = true;
  double worst = 1e300;
  for (const Fixture& f : anderson_fixtures(1e-12)) {
    double mn = 1e300;
    for (double v : f.landscape.u) mn = std::min(mn, v);
    worst = std::min(worst, mn);
    pass = pass && mn >= 1.0 - 1e-8;
  }
  report(4, "landscape floor u >= 1 on Anderson fixtures", pass,
         fmt("min u %.12f", worst), total.seconds());
}

struct LawFixture {
  CountingCurve curve_N;
  LandscapeField landscape;
};

std::vector<LawFixture> law_fixtures(const std::vector<double>& mu) {
  std::vector<LawFixture> out;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TorusGrid g(1, 64, 8);
    DiscreteOperator op(anderson(g, DistributionSpec::uniform01(), seed));
    const Spectrum spec = op.eigen_dense();
    LandscapeField u = solve_landscape(op);
    out.push_back(LawFixture{ids_curve(spec, mu, g), std::move(u)});
  }
  return out;
}

void criterion_5_and_6() {
  const TorusGrid g(1, 64, 8);
  const double mu_min = (1.0 + 1e-9) / (64.0 * 64.0);
  const std::vector<double> mu = geometric_mu_grid(mu_min, 50.0, 64);

  Timer t5;
  std::vector<LawFixture> fixtures = law_fixtures(mu);
  bool pass5 = true;
  double c4_max = 0.0;
  std::size_t excluded_rows = 0;
  for (const LawFixture& f : fixtures) {
    try {
      const UpperFitResult fit =
          fit_constant_upper(f.curve_N, f.landscape, mu.front(), mu.back());
      c4_max = std::max(c4_max, fit.C4);
      excluded_rows = std::max(excluded_rows, fit.excluded_mu.size());
    } catch (const NoFiniteConstant&) {
      pass5 = false;
    }
  }
  if (g_pilot)
    std::printf("pilot: C4_max = %.6f (max excluded rows %zu)\n", c4_max,
                excluded_rows);
  else
    pass5 = pass5 && c4_max <= kUpperC4Bound;
  pass5 = pass5 && t5.seconds() < 600.0;
  report(5, "upper landscape law constant on 20 realizations", pass5,
         fmt("max C4_hat %.4f <= %.2f, %zu rows excluded at C4*mu", c4_max,
             kUpperC4Bound, excluded_rows),
         t5.seconds());

  Timer t6;
  double c1 = kLowerC1;
  if (g_pilot) {
    std::vector<std::pair<const CountingCurve*, const LandscapeField*>> samples;
    for (const LawFixture& f : fixtures)
      samples.emplace_back(&f.curve_N, &f.landscape);
    const LowerConstantFit fit = fit_lower_C1(
        samples, kLowerAlpha, kLowerC2, kLowerC3, mu.front(), mu.back(), 0.99);
    std::printf("pilot: lower C1 = %.6f over %lld constrained rows\n", fit.C1,
                static_cast<long long>(fit.constrained_rows));
    c1 = fit.C1;
  }
  bool pass6 = true;
  std::size_t verdict_rows = 0;
  for (const LawFixture& f : fixtures) {
    const LowerCheckResult res =
        check_lower_general(f.curve_N, f.landscape, kLowerAlpha, c1, kLowerC2,
                            kLowerC3, mu.front(), mu.back());
    verdict_rows += res.rows.size();
    pass6 = pass6 && res.all_pass;
  }
  pass6 = pass6 && verdict_rows > 0;
  report(6, "lower landscape law with frozen constants", pass6,
         fmt("C1=%.4g C2=%.4g C3=%.4g alpha=1/32, %zu admissible rows all pass",
             c1, kLowerC2, kLowerC3, verdict_rows),
         t6.seconds());
}

void criterion_7() {
  Timer total;
  bool pass = true;
  std::int64_t checked = 0, violations = 0;
  for (std::int64_t N = 1; N <= 50; ++N)
    for (int i = 1; i <= 10; ++i)
      for (int j = i + 2; j <= 19; ++j) {
        const double p = i / 20.0;
        const double mu = j / 20.0;
        const std::int64_t k = (j * N + 19) / 20;
        const double exact = binomial_tail_exact(N, p, k);
        const double bound = chernoff_bound(mu, p, N);
        if (exact > bound * (1.0 + 1e-12)) ++violations;
        ++checked;
      }
  pass = violations == 0 && total.seconds() < 10.0;
  report(7, "Chernoff bound dominates exact binomial tails", pass,
         fmt("%lld combinations, %lld violations",
             static_cast<long long>(checked),
             static_cast<long long>(violations)),
         total.seconds());
}

void criterion_8() {
  Timer total;
  int wins = 0;
  const int seeds = 10;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const TorusGrid g(1, 512, 8);
    const PotentialField v = anderson(g, DistributionSpec::uniform01(), seed);
    DiscreteOperator op(v);
    const Spectrum spec = op.eigen_dense();
    const LandscapeField u = solve_landscape(op);
    const std::vector<double> W = effective_potential(u);

    const double total_states = static_cast<double>(g.total_points());
    const double mu_half =
        spec.eigenvalues[static_cast<std::size_t>(g.total_points() / 2)];
    const std::vector<double> mu = linear_mu_grid(0.0, mu_half, 256);
    double sup_w = 0.0, sup_v = 0.0;
    for (double m : mu) {
      const double N = static_cast<double>(spec.count_below(m));
      if (N > 0.5 * total_states) break;  // first half of the states only
      const double NV = weyl_predictor(v.values, g, m) * g.volume();
      const double NW = weyl_predictor(W, g, m) * g.volume();
      sup_v = std::max(sup_v, std::abs(NV - N));
      sup_w = std::max(sup_w, std::abs(NW - N));
    }
    if (sup_w < sup_v) ++wins;
  }
  const bool pass = wins >= 9 && total.seconds() < 900.0;
  report(8, "landscape Weyl predictor beats the classical one (figure 1)",
         pass, fmt("%d of %d seeds", wins, seeds), total.seconds());
}

void criterion_9() {
  Timer total;
  EnsembleConfig cfg;
  cfg.distribution = DistributionSpec::bernoulli(0.5);
  cfg.dim = 1;
  cfg.R0 = 128;
  cfg.n = 8;
  cfg.realization_count = 64;
  cfg.base_seed = 42;
  // grid spans the tail regime; the shoulder above mu ~ 0.1 is saturated
  // cube counting, not tail decay
  cfg.mu_grid = geometric_mu_grid(0.003, 0.1, 24);
  cfg.compute_ids = false;  // only N_u^E enters this criterion
  const EnsembleResult res = expectation_curves(cfg);

  const auto [first, last] = tail_window(res.landscape, 0.3);
  bool pass = first >= 0 && last - first + 1 >= 5;
  double r2 = 0.0, slope = 0.0;
  if (pass) {
    std::vector<double> x, y;
    for (std::int64_t i = first; i <= last; ++i) {
      x.push_back(std::pow(res.landscape.mu[static_cast<std::size_t>(i)], -0.5));
      y.push_back(std::log(res.landscape.mean[static_cast<std::size_t>(i)]));
    }
    const LinearFit fit = linear_fit(x, y);
    r2 = fit.r_squared;
    slope = fit.slope;
    pass = r2 >= 0.9;
  }
  report(9, "Bernoulli tail: log N_u^E linear in mu^{-1/2}", pass,
         fmt("window %lld points, R^2 %.4f, slope %.3f",
             first >= 0 ? static_cast<long long>(last - first + 1) : 0, r2,
             slope),
         total.seconds());
}

void criterion_10() {
  Timer total;
  bool pass = true;
  double worst = 0.0;
  for (int d : {1, 2}) {
    const TorusGrid g(d, 8, 8);
    const LandscapeField flat{
        g, std::vector<double>(static_cast<std::size_t>(g.total_points()), 1.0),
        0.0, 0, "{}"};
    const DoublingResult res =
        check_doubling(flat, std::vector<double>{0.5, 1.0, 2.0});
    for (const DoublingRow& row : res.rows) {
      const double want = std::pow(2.0, d) / (1.0 + std::pow(row.s, 4.0));
      worst = std::max(worst, std::abs(row.ratio - want));
      pass = pass && std::abs(row.ratio - want) <= 1e-12;
    }
  }
  report(10, "doubling ratio closed form on the flat landscape", pass,
         fmt("max deviation %.2e", worst), total.seconds());
}

}  // namespace

int main() {
  g_pilot = std::getenv("LLAB_ACCEPTANCE_PILOT") != nullptr;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5_and_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
