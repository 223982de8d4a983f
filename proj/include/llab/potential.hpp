#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "llab/torus_grid.hpp"

namespace llab {

// Smooth radial bump supported in the ball of radius 1/10, equal to 1 at the
// center: phi(r) = exp(1 - 1/(1 - (10 r)^2)) for r < 1/10, else 0.
struct BumpProfile {
  static constexpr double radius = 0.1;
  double operator()(double r) const;
};

// Amplitude laws F(delta) = P{omega <= delta} on [0,1].
struct DistributionSpec {
  enum class Kind { bernoulli, uniform01, power, exp_tail };

  Kind kind = Kind::uniform01;
  double p = 0.5;    // bernoulli: P{omega = 1}
  double beta = 1.0; // power: F(delta) = delta^beta
  double C = 1.0;    // exp_tail: F(delta) = exp(-C delta^-a), atom at 1
  double a = 1.0;

  static DistributionSpec bernoulli(double p);
  static DistributionSpec uniform01();
  static DistributionSpec power(double beta);
  static DistributionSpec exp_tail(double C, double a);

  double cdf(double delta) const;      // OutOfRange outside [0,1]
  double quantile(double u) const;     // inverse transform, u in [0,1)
  std::string tag() const;             // e.g. "bernoulli(0.5)"
  static DistributionSpec parse(const std::string& tag);
};

double eval_F(const DistributionSpec& spec, double delta);

// Counter-based stream: the draw for (seed, realization, site) never depends
// on any other site, so ensembles are reproducible and order-independent.
std::uint64_t mix_counter(std::uint64_t seed, std::uint64_t realization,
                          std::uint64_t site);
double unit_double(std::uint64_t bits);  // [0,1)

std::vector<double> sample_omegas(const DistributionSpec& spec,
                                  std::int64_t site_count, std::uint64_t seed,
                                  std::uint64_t realization);

struct PotentialField {
  TorusGrid grid;
  std::vector<double> values;
  std::vector<double> omegas;  // empty unless Anderson-assembled
  std::string provenance;      // single-line JSON
};

// V(x) = sum_j omega_j phi(x - j) over integer sites j of the torus.
PotentialField assemble_anderson(const TorusGrid& grid,
                                 std::span<const double> omegas,
                                 std::string provenance = "{}");

PotentialField constant_potential(const TorusGrid& grid, double c);

std::int64_t site_count(const TorusGrid& grid);  // R0^d

}  // namespace llab
