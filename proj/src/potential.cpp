#include "llab/potential.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "llab/errors.hpp"

namespace llab {

double BumpProfile::operator()(double r) const {
  const double t = 10.0 * r;
  if (!(t < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

DistributionSpec DistributionSpec::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidParameters("bernoulli p must lie in [0,1]");
  DistributionSpec s;
  s.kind = Kind::bernoulli;
  s.p = p;
  return s;
}

DistributionSpec DistributionSpec::uniform01() {
  DistributionSpec s;
  s.kind = Kind::uniform01;
  return s;
}

DistributionSpec DistributionSpec::power(double beta) {
  if (!(beta > 0.0)) throw InvalidParameters("power beta must be positive");
  DistributionSpec s;
  s.kind = Kind::power;
  s.beta = beta;
  return s;
}

DistributionSpec DistributionSpec::exp_tail(double C, double a) {
  if (!(C > 0.0) || !(a > 0.0))
    throw InvalidParameters("exp_tail requires C > 0 and a > 0");
  DistributionSpec s;
  s.kind = Kind::exp_tail;
  s.C = C;
  s.a = a;
  return s;
}

double DistributionSpec::cdf(double delta) const {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw OutOfRange("F is defined on [0,1]");
  switch (kind) {
    case Kind::bernoulli:
      return delta < 1.0 ? 1.0 - p : 1.0;
    case Kind::uniform01:
      return delta;
    case Kind::power:
      return std::pow(delta, beta);
    case Kind::exp_tail:
      // F(1) = 1 via an atom at delta = 1 of mass 1 - e^{-C}.
      if (delta >= 1.0) return 1.0;
      if (delta <= 0.0) return 0.0;
      return std::exp(-C * std::pow(delta, -a));
  }
  return 0.0;
}

double DistributionSpec::quantile(double u) const {
  switch (kind) {
    case Kind::bernoulli:
      return u < 1.0 - p ? 0.0 : 1.0;
    case Kind::uniform01:
      return u;
    case Kind::power:
      return std::pow(u, 1.0 / beta);
    case Kind::exp_tail: {
      if (u <= 0.0) return 0.0;
      if (u >= std::exp(-C)) return 1.0;
      return std::pow(C / (-std::log(u)), 1.0 / a);
    }
  }
  return 0.0;
}

std::string DistributionSpec::tag() const {
  char buf[96];
  switch (kind) {
    case Kind::bernoulli:
      std::snprintf(buf, sizeof buf, "bernoulli(%.17g)", p);
      break;
    case Kind::uniform01:
      std::snprintf(buf, sizeof buf, "uniform01");
      break;
    case Kind::power:
      std::snprintf(buf, sizeof buf, "power(%.17g)", beta);
      break;
    case Kind::exp_tail:
      std::snprintf(buf, sizeof buf, "exp_tail(%.17g,%.17g)", C, a);
      break;
  }
  return buf;
}

DistributionSpec DistributionSpec::parse(const std::string& tag) {
  auto args = [&](std::size_t open) {
    if (tag.back() != ')') throw InvalidParameters("bad distribution tag: " + tag);
    std::vector<double> out;
    std::stringstream ss(tag.substr(open + 1, tag.size() - open - 2));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
  };
  if (tag == "uniform01") return uniform01();
  if (tag.rfind("bernoulli(", 0) == 0) {
    auto v = args(9);
    if (v.size() != 1) throw InvalidParameters("bernoulli takes one parameter");
    return bernoulli(v[0]);
  }
  if (tag.rfind("power(", 0) == 0) {
    auto v = args(5);
    if (v.size() != 1) throw InvalidParameters("power takes one parameter");
    return power(v[0]);
  }
  if (tag.rfind("exp_tail(", 0) == 0) {
    auto v = args(8);
    if (v.size() != 2) throw InvalidParameters("exp_tail takes two parameters");
    return exp_tail(v[0], v[1]);
  }
  throw InvalidParameters("unknown distribution tag: " + tag);
}

double eval_F(const DistributionSpec& spec, double delta) {
  return spec.cdf(delta);
}

namespace {
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t mix_counter(std::uint64_t seed, std::uint64_t realization,
                          std::uint64_t site) {
  return splitmix64(splitmix64(splitmix64(seed) ^ realization) ^ site);
}

double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::vector<double> sample_omegas(const DistributionSpec& spec,
                                  std::int64_t site_count, std::uint64_t seed,
                                  std::uint64_t realization) {
  if (site_count < 1) throw InvalidParameters("site_count must be positive");
  std::vector<double> omegas(static_cast<std::size_t>(site_count));
  for (std::int64_t j = 0; j < site_count; ++j) {
    const double u = unit_double(
        mix_counter(seed, realization, static_cast<std::uint64_t>(j)));
    omegas[static_cast<std::size_t>(j)] = spec.quantile(u);
  }
  return omegas;
}

std::int64_t site_count(const TorusGrid& grid) {
  std::int64_t s = 1;
  for (int a = 0; a < grid.dim(); ++a) s *= grid.side_length();
  return s;
}

PotentialField assemble_anderson(const TorusGrid& grid,
                                 std::span<const double> omegas,
                                 std::string provenance) {
  const std::int64_t sites = site_count(grid);
  if (static_cast<std::int64_t>(omegas.size()) != sites)
    throw SiteCountMismatch("expected " + std::to_string(sites) +
                            " amplitudes, got " + std::to_string(omegas.size()));
  if (grid.points_per_unit() < 10)
    std::cerr << "llab: warning: n = " << grid.points_per_unit()
              << " under-resolves the radius-1/10 bump (recommend n >= 10)\n";

  const int d = grid.dim();
  const int n = grid.points_per_unit();
  const std::int64_t N = grid.axis_points();
  const double h = grid.spacing();
  const BumpProfile phi;

  // Grid offsets k with |k|h < 1/10; bump supports never overlap since the
  // radius is below half the site spacing.
  const std::int64_t reach = static_cast<std::int64_t>(std::ceil(0.1 * n));

  PotentialField field{grid, std::vector<double>(grid.total_points(), 0.0),
                       std::vector<double>(omegas.begin(), omegas.end()),
                       std::move(provenance)};

  const std::int64_t R0 = grid.side_length();
  std::array<std::int64_t, 3> site{0, 0, 0};
  for (std::int64_t j = 0; j < sites; ++j) {
    const double w = omegas[static_cast<std::size_t>(j)];
    std::int64_t rest = j;
    for (int a = d - 1; a >= 0; --a) {
      site[a] = rest % R0;
      rest /= R0;
    }
    if (w != 0.0) {
      std::array<std::int64_t, 3> k{0, 0, 0};
      const std::int64_t lo = -reach, hi = reach;
      for (k[0] = lo; k[0] <= (d > 0 ? hi : lo); ++k[0]) {
        for (k[1] = (d > 1 ? lo : 0); k[1] <= (d > 1 ? hi : 0); ++k[1]) {
          for (k[2] = (d > 2 ? lo : 0); k[2] <= (d > 2 ? hi : 0); ++k[2]) {
            double r2 = 0.0;
            for (int a = 0; a < d; ++a) r2 += static_cast<double>(k[a] * k[a]);
            const double r = h * std::sqrt(r2);
            const double v = phi(r);
            if (v == 0.0) continue;
            std::int64_t idx = 0;
            for (int a = 0; a < d; ++a)
              idx = idx * N + grid.wrap(site[a] * n + k[a]);
            field.values[static_cast<std::size_t>(idx)] += w * v;
          }
        }
      }
    }
  }
  return field;
}

PotentialField constant_potential(const TorusGrid& grid, double c) {
  if (!(c >= 0.0)) throw NegativeConstant("constant potential must be >= 0");
  return PotentialField{grid, std::vector<double>(grid.total_points(), c), {},
                        "{\"preset\":\"constant\",\"c\":" + std::to_string(c) + "}"};
}

}  // namespace llab
