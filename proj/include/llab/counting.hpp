#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "llab/discrete_operator.hpp"
#include "llab/landscape.hpp"
#include "llab/torus_grid.hpp"

namespace llab {

// A monotone-ish function of mu sampled on an ascending grid; values are
// counts per unit volume (divided by R0^d). stderr_ is present only for
// ensemble means.
struct CountingCurve {
  std::vector<double> mu;
  std::vector<double> value;
  std::vector<double> stderr_;
  std::string kind;  // IDOS | landscape_count | weyl_V | weyl_W | ensemble_mean
};

std::vector<double> geometric_mu_grid(double lo, double hi,
                                      int points_per_decade = 64);
std::vector<double> linear_mu_grid(double lo, double hi, int points);

// N(mu): eigenvalue counting per unit volume.
CountingCurve ids_curve(const Spectrum& spectrum, std::span<const double> mu_grid,
                        const TorusGrid& grid);

// N_u(mu): fraction of kappa mu^{-1/2} cubes where min_Q 1/u <= mu
// (equivalently max_Q u >= 1/mu). Re-partitions the grid for each argument.
double landscape_count(const LandscapeField& landscape, double mu);
CountingCurve landscape_curve(const LandscapeField& landscape,
                              std::span<const double> mu_grid);

// Phase-space volume predictor
//   (2 pi)^{-d} omega_d h^d/R0^d sum_i (mu - field_i)_+^{d/2}.
double weyl_predictor(std::span<const double> field, const TorusGrid& grid,
                      double mu);
CountingCurve weyl_curve(std::span<const double> field, const TorusGrid& grid,
                         std::span<const double> mu_grid, std::string kind);

struct UpperFitResult {
  double C4 = 1.0;
  // mu rows whose rescaled argument C4*mu has no admissible partition; they
  // are excluded from the verified set and reported.
  std::vector<double> excluded_mu;
};

// A curve read N_u(nu); may throw ScaleExceedsDomain or CubeUnresolvable for
// inadmissible arguments.
using CurveEvaluator = std::function<double(double)>;

// Smallest C >= 1 with N(mu) <= N_u(C mu) across the range, by bisection to
// relative tolerance rel_tol. Throws NoFiniteConstant when even C_max fails.
UpperFitResult fit_constant_upper(const CountingCurve& curve_N,
                                  const CurveEvaluator& nu_of, double mu_lo,
                                  double mu_hi, double C_max = 1e3,
                                  double rel_tol = 1e-3);
UpperFitResult fit_constant_upper(const CountingCurve& curve_N,
                                  const LandscapeField& landscape,
                                  double mu_lo, double mu_hi,
                                  double C_max = 1e3, double rel_tol = 1e-3);

// C1 a^d N_u(C2 a^{d+2} mu) - C3 N_u(C2 a^{d+4} mu) with a = alpha < 2^{-4}.
double lower_bound_value(const LandscapeField& landscape, double mu,
                         double alpha, double C1, double C2, double C3);

// Header row "mu,value[,stderr]", one row per point, 17 significant digits.
void write_curve_csv(std::ostream& out, const CountingCurve& curve);

}  // namespace llab
