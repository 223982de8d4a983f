#include "llab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "llab/errors.hpp"
#include "llab/kernels.hpp"

namespace llab {

std::vector<double> geometric_mu_grid(double lo, double hi,
                                      int points_per_decade) {
  if (!(lo > 0.0) || !(hi > lo))
    throw InvalidParameters("geometric grid requires 0 < lo < hi");
  if (points_per_decade < 1)
    throw InvalidParameters("points_per_decade must be >= 1");
  const double decades = std::log10(hi / lo);
  const auto count =
      std::max<std::int64_t>(2, std::llround(decades * points_per_decade) + 1);
  std::vector<double> mu(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
    mu[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  mu.front() = lo;
  mu.back() = hi;
  return mu;
}

std::vector<double> linear_mu_grid(double lo, double hi, int points) {
  if (!(hi > lo) || points < 2)
    throw InvalidParameters("linear grid requires lo < hi and points >= 2");
  std::vector<double> mu(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    mu[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return mu;
}

CountingCurve ids_curve(const Spectrum& spectrum,
                        std::span<const double> mu_grid, const TorusGrid& grid) {
  if (spectrum.eigenvalues.empty())
    throw EmptySpectrum("ids_curve needs a nonempty spectrum");
  CountingCurve c;
  c.kind = "IDOS";
  c.mu.assign(mu_grid.begin(), mu_grid.end());
  c.value.resize(c.mu.size());
  const double inv_vol = 1.0 / grid.volume();
  for (std::size_t i = 0; i < c.mu.size(); ++i)
    c.value[i] = static_cast<double>(spectrum.count_below(c.mu[i])) * inv_vol;
  return c;
}

double landscape_count(const LandscapeField& landscape, double mu) {
  const CubePartition part = partition(landscape.grid, mu);
  const double threshold = 1.0 / mu;
  std::int64_t hits = 0;
  const std::int64_t cubes = part.cube_count();
  for (std::int64_t q = 0; q < cubes; ++q)
    if (part.reduce(landscape.u, q, Reduction::max) >= threshold) ++hits;
  return static_cast<double>(hits) / landscape.grid.volume();
}

CountingCurve landscape_curve(const LandscapeField& landscape,
                              std::span<const double> mu_grid) {
  CountingCurve c;
  c.kind = "landscape_count";
  c.mu.assign(mu_grid.begin(), mu_grid.end());
  c.value.resize(c.mu.size());
  for (std::size_t i = 0; i < c.mu.size(); ++i)
    c.value[i] = landscape_count(landscape, c.mu[i]);
  return c;
}

double weyl_predictor(std::span<const double> field, const TorusGrid& grid,
                      double mu) {
  if (static_cast<std::int64_t>(field.size()) != grid.total_points())
    throw GridMismatch("weyl_predictor: field size does not match grid");
  const int d = grid.dim();
  // unit-ball volumes for d = 1, 2, 3
  static const double omega_d[3] = {2.0, std::numbers::pi,
                                    4.0 * std::numbers::pi / 3.0};
  const double phase =
      omega_d[d - 1] / std::pow(2.0 * std::numbers::pi, d);
  const double sum =
      kernels::active().halfpow_sum(field.data(), mu, d, field.size());
  return phase * (grid.cell_volume() / grid.volume()) * sum;
}

CountingCurve weyl_curve(std::span<const double> field, const TorusGrid& grid,
                         std::span<const double> mu_grid, std::string kind) {
  CountingCurve c;
  c.kind = std::move(kind);
  c.mu.assign(mu_grid.begin(), mu_grid.end());
  c.value.resize(c.mu.size());
  for (std::size_t i = 0; i < c.mu.size(); ++i)
    c.value[i] = weyl_predictor(field, grid, c.mu[i]);
  return c;
}

namespace {

struct UpperProbe {
  bool holds = false;
  std::int64_t checked = 0;
  std::vector<double> excluded;
};

UpperProbe probe_upper(const CountingCurve& curve_N, const CurveEvaluator& nu_of,
                       double mu_lo, double mu_hi, double C) {
  UpperProbe probe;
  probe.holds = true;
  for (std::size_t i = 0; i < curve_N.mu.size(); ++i) {
    const double mu = curve_N.mu[i];
    if (mu < mu_lo || mu > mu_hi) continue;
    double nu_val;
    try {
      nu_val = nu_of(C * mu);
    } catch (const ScaleExceedsDomain&) {
      probe.excluded.push_back(mu);
      continue;
    } catch (const CubeUnresolvable&) {
      probe.excluded.push_back(mu);
      continue;
    }
    ++probe.checked;
    const double slack = 1e-12 * std::max(1.0, nu_val);
    if (curve_N.value[i] > nu_val + slack) {
      probe.holds = false;
      return probe;
    }
  }
  if (probe.checked == 0) probe.holds = false;
  return probe;
}

}  // namespace

UpperFitResult fit_constant_upper(const CountingCurve& curve_N,
                                  const CurveEvaluator& nu_of, double mu_lo,
                                  double mu_hi, double C_max, double rel_tol) {
  if (!(C_max >= 1.0)) throw InvalidParameters("C_max must be >= 1");
  UpperProbe at_one = probe_upper(curve_N, nu_of, mu_lo, mu_hi, 1.0);
  if (at_one.holds) return {1.0, std::move(at_one.excluded)};

  double lo = 1.0, hi = 1.0;
  UpperProbe at_hi;
  bool found = false;
  while (hi < C_max) {
    lo = hi;
    hi = std::min(2.0 * hi, C_max);
    at_hi = probe_upper(curve_N, nu_of, mu_lo, mu_hi, hi);
    if (at_hi.holds) {
      found = true;
      break;
    }
  }
  if (!found)
    throw NoFiniteConstant("N(mu) <= N_u(C mu) fails for every C up to " +
                           std::to_string(C_max));
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    UpperProbe at_mid = probe_upper(curve_N, nu_of, mu_lo, mu_hi, mid);
    if (at_mid.holds) {
      hi = mid;
      at_hi = std::move(at_mid);
    } else {
      lo = mid;
    }
  }
  return {hi, std::move(at_hi.excluded)};
}

UpperFitResult fit_constant_upper(const CountingCurve& curve_N,
                                  const LandscapeField& landscape, double mu_lo,
                                  double mu_hi, double C_max, double rel_tol) {
  return fit_constant_upper(
      curve_N, [&](double nu) { return landscape_count(landscape, nu); },
      mu_lo, mu_hi, C_max, rel_tol);
}

double lower_bound_value(const LandscapeField& landscape, double mu,
                         double alpha, double C1, double C2, double C3) {
  if (!(alpha > 0.0) || !(alpha < 0.0625))
    throw InvalidParameters("alpha must lie in (0, 2^-4)");
  double alpha_d = 1.0, alpha_d2 = 1.0;
  for (int a = 0; a < landscape.grid.dim(); ++a) alpha_d *= alpha;
  alpha_d2 = alpha_d * alpha * alpha;                 // alpha^{d+2}
  const double alpha_d4 = alpha_d2 * alpha * alpha;   // alpha^{d+4}
  const double n1 = landscape_count(landscape, C2 * alpha_d2 * mu);
  const double n2 = landscape_count(landscape, C2 * alpha_d4 * mu);
  return C1 * alpha_d * n1 - C3 * n2;
}

void write_curve_csv(std::ostream& out, const CountingCurve& curve) {
  const bool with_stderr = !curve.stderr_.empty();
  out << (with_stderr ? "mu,value,stderr\n" : "mu,value\n");
  char buf[96];
  for (std::size_t i = 0; i < curve.mu.size(); ++i) {
    if (with_stderr)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", curve.mu[i],
                    curve.value[i], curve.stderr_[i]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.mu[i],
                    curve.value[i]);
    out << buf;
  }
}

}  // namespace llab
