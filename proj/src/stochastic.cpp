#include "llab/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <optional>
#include <thread>

#include "llab/errors.hpp"
#include "llab/field_io.hpp"

namespace llab {

namespace {

struct RealizationOutcome {
  bool skipped = false;
  std::vector<double> ids;
  std::vector<double> landscape;
  std::string checksum;
};

RealizationOutcome run_realization(const EnsembleConfig& cfg,
                                   const TorusGrid& grid, std::int64_t r) {
  RealizationOutcome out;
  const std::vector<double> omegas =
      sample_omegas(cfg.distribution, site_count(grid), cfg.base_seed,
                    static_cast<std::uint64_t>(r));
  out.checksum = sha256_hex(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(omegas.data()),
      omegas.size() * sizeof(double)));

  PotentialField V = assemble_anderson(grid, omegas);
  const double vmax =
      *std::max_element(V.values.begin(), V.values.end());
  if (vmax <= 0.0) {
    // possible only when the amplitude law has an atom at zero
    std::cerr << "llab: realization " << r
              << " drew V = 0 (singular operator), skipping\n";
    out.skipped = true;
    return out;
  }
  DiscreteOperator op(std::move(V));
  const LandscapeField u = solve_landscape(op, cfg.solver);

  out.landscape.resize(cfg.mu_grid.size());
  for (std::size_t i = 0; i < cfg.mu_grid.size(); ++i)
    out.landscape[i] = landscape_count(u, cfg.mu_grid[i]);

  if (cfg.compute_ids) {
    const Spectrum spec = op.eigen_dense(cfg.dense_dof_limit);
    const CountingCurve c = ids_curve(spec, cfg.mu_grid, grid);
    out.ids = c.value;
  }
  return out;
}

EnsembleCurve aggregate(const std::vector<double>& mu,
                        const std::vector<const std::vector<double>*>& rows) {
  EnsembleCurve curve;
  curve.mu = mu;
  curve.realization_count = static_cast<std::int64_t>(rows.size());
  curve.mean.assign(mu.size(), 0.0);
  curve.stderr_.assign(mu.size(), 0.0);
  if (rows.empty()) return curve;
  for (const auto* row : rows)
    for (std::size_t i = 0; i < mu.size(); ++i) curve.mean[i] += (*row)[i];
  const double inv_r = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < mu.size(); ++i) curve.mean[i] *= inv_r;
  if (rows.size() > 1) {
    for (const auto* row : rows)
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const double d = (*row)[i] - curve.mean[i];
        curve.stderr_[i] += d * d;
      }
    for (std::size_t i = 0; i < mu.size(); ++i)
      curve.stderr_[i] = std::sqrt(curve.stderr_[i] /
                                   (static_cast<double>(rows.size()) *
                                    (static_cast<double>(rows.size()) - 1.0)));
  }
  return curve;
}

}  // namespace

EnsembleResult expectation_curves(const EnsembleConfig& cfg) {
  if (cfg.realization_count < 1)
    throw InvalidParameters("realization_count must be >= 1");
  if (cfg.mu_grid.empty()) throw InvalidParameters("mu grid is empty");
  if (!std::is_sorted(cfg.mu_grid.begin(), cfg.mu_grid.end()))
    throw InvalidParameters("mu grid must be ascending");
  const TorusGrid grid = build_grid(cfg.dim, cfg.R0, cfg.n);
  if (cfg.compute_ids && grid.total_points() > cfg.dense_dof_limit)
    throw TooLargeForDense("ensemble IDOS needs a dense-feasible grid");

  std::vector<RealizationOutcome> outcomes(
      static_cast<std::size_t>(cfg.realization_count));
  const int workers = std::max(
      1, std::min<int>(cfg.threads,
                       static_cast<int>(cfg.realization_count)));
  if (workers == 1) {
    for (std::int64_t r = 0; r < cfg.realization_count; ++r)
      outcomes[static_cast<std::size_t>(r)] = run_realization(cfg, grid, r);
  } else {
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::optional<std::string>> failures(
        static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          while (true) {
            const std::int64_t r = next.fetch_add(1);
            if (r >= cfg.realization_count) break;
            outcomes[static_cast<std::size_t>(r)] = run_realization(cfg, grid, r);
          }
        } catch (const std::exception& e) {
          failures[static_cast<std::size_t>(w)] = e.what();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
      if (f) throw NotConverged("ensemble worker failed: " + *f);
  }

  EnsembleResult result;
  std::vector<const std::vector<double>*> ids_rows, landscape_rows;
  for (std::int64_t r = 0; r < cfg.realization_count; ++r) {
    auto& o = outcomes[static_cast<std::size_t>(r)];
    result.realization_checksums.push_back(o.checksum);
    if (o.skipped) {
      result.skipped_realizations.push_back(r);
      continue;
    }
    landscape_rows.push_back(&o.landscape);
    if (cfg.compute_ids) ids_rows.push_back(&o.ids);
  }
  result.landscape = aggregate(cfg.mu_grid, landscape_rows);
  if (cfg.compute_ids) result.ids = aggregate(cfg.mu_grid, ids_rows);
  return result;
}

double chernoff_log_bound(double mu_frac, double F_value,
                          std::int64_t N_sites) {
  if (!(mu_frac > 0.0 && mu_frac < 1.0))
    throw InvalidParameters("chernoff bound needs 0 < mu < 1");
  if (!(F_value > 0.0))
    throw InvalidParameters("chernoff bound needs F > 0");
  if (N_sites < 1) throw InvalidParameters("N_sites must be >= 1");
  if (F_value >= mu_frac)
    throw ConditionViolated("lemma requires F(delta) < mu");
  const double log_H = -(mu_frac * std::log(mu_frac) +
                         (1.0 - mu_frac) * std::log1p(-mu_frac));
  return static_cast<double>(N_sites) *
         (log_H + mu_frac * std::log(F_value));
}

double chernoff_bound(double mu_frac, double F_value, std::int64_t N_sites) {
  return std::exp(chernoff_log_bound(mu_frac, F_value, N_sites));
}

double binomial_tail_exact(std::int64_t N, double p, std::int64_t k) {
  if (N < 0 || k < 0 || k > N)
    throw InvalidParameters("binomial tail needs 0 <= k <= N");
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidParameters("binomial tail needs p in [0,1]");
  if (k == 0) return 1.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgN = std::lgamma(static_cast<double>(N) + 1.0);
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(N - k + 1));
  for (std::int64_t j = k; j <= N; ++j) {
    const double lc = lgN - std::lgamma(static_cast<double>(j) + 1.0) -
                      std::lgamma(static_cast<double>(N - j) + 1.0);
    log_terms.push_back(lc + static_cast<double>(j) * lp +
                        static_cast<double>(N - j) * lq);
  }
  const double m = *std::max_element(log_terms.begin(), log_terms.end());
  if (m == -std::numeric_limits<double>::infinity()) return 0.0;
  double acc = 0.0;
  for (double lt : log_terms) acc += std::exp(lt - m);
  return std::exp(m) * acc;
}

double tail_envelope(const TailEnvelopeParams& params,
                     const std::function<double(double)>& F_evaluator,
                     double mu) {
  if (!(params.gamma_pre > 0.0) || !(params.gamma_exp > 0.0) ||
      !(params.c_scale > 0.0))
    throw InvalidParameters("tail envelope parameters must be positive");
  if (!(mu > 0.0)) throw InvalidParameters("tail envelope needs mu > 0");
  const double d_half = 0.5 * params.dim;
  const double F = F_evaluator(params.c_scale * mu);
  if (F <= 0.0) return 0.0;
  double log_tail = 0.0;
  if (F < 1.0)
    log_tail = params.gamma_exp * std::pow(mu, -d_half) * std::log(F);
  const double log_value =
      std::log(params.gamma_pre) + d_half * std::log(mu) + log_tail;
  return std::exp(log_value);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidParameters("linear fit needs >= 2 matched points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InvalidParameters("linear fit: degenerate abscissa");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

LifschitzFit lifschitz_fit(const CountingCurve& curve, double mu_lo,
                           double mu_hi) {
  std::vector<double> x, y;
  bool non_tail = false;
  for (std::size_t i = 0; i < curve.mu.size(); ++i) {
    const double mu = curve.mu[i];
    if (mu < mu_lo || mu > mu_hi) continue;
    const double v = curve.value[i];
    if (!(v > 0.0))
      throw NonPositiveCurve("lifschitz fit needs positive values on the window");
    const double log_v = std::log(v);
    if (std::abs(log_v) < 1.0) non_tail = true;  // value above 1/e
    x.push_back(-std::log(mu));
    y.push_back(std::log(std::abs(log_v)));
  }
  if (x.size() < 2)
    throw InvalidParameters("lifschitz fit window holds fewer than 2 points");
  const LinearFit fit = linear_fit(x, y);
  return {fit.slope, fit.r_squared, non_tail};
}

std::pair<std::int64_t, std::int64_t> tail_window(const EnsembleCurve& curve,
                                                  double rel_stderr_max) {
  std::int64_t best_first = -1, best_len = 0, first = -1;
  const auto size = static_cast<std::int64_t>(curve.mu.size());
  for (std::int64_t i = 0; i <= size; ++i) {
    const bool ok =
        i < size && curve.mean[static_cast<std::size_t>(i)] > 0.0 &&
        curve.stderr_[static_cast<std::size_t>(i)] <
            rel_stderr_max * curve.mean[static_cast<std::size_t>(i)];
    if (ok) {
      if (first < 0) first = i;
    } else if (first >= 0) {
      if (i - first > best_len) {
        best_len = i - first;
        best_first = first;
      }
      first = -1;
    }
  }
  if (best_first < 0) return {-1, -1};
  return {best_first, best_first + best_len - 1};
}

ExpectationSandwich expectation_sandwich(const EnsembleCurve& ids,
                                         const EnsembleCurve& landscape) {
  if (ids.mu != landscape.mu)
    throw InvalidParameters("sandwich check needs matching mu grids");
  const auto len = static_cast<std::int64_t>(ids.mu.size());
  if (len < 4) throw InvalidParameters("sandwich check needs >= 4 grid points");
  const double ratio = ids.mu[1] / ids.mu[0];
  // keep a usable overlap after shifting
  const std::int64_t max_shift = len - std::max<std::int64_t>(3, len / 4);

  ExpectationSandwich out;
  for (std::int64_t k = 0; k <= max_shift && !out.found_upper; ++k) {
    bool ok = true;
    for (std::int64_t i = 0; i + k < len; ++i)
      ok = ok && ids.mean[static_cast<std::size_t>(i)] <=
                     landscape.mean[static_cast<std::size_t>(i + k)] + 1e-12;
    if (ok) {
      out.found_upper = true;
      out.shift_upper = k;
      out.C4 = std::pow(ratio, static_cast<double>(k));
    }
  }
  for (std::int64_t m = 0; m <= max_shift && !out.found_lower; ++m) {
    bool ok = true;
    for (std::int64_t i = m; i < len; ++i)
      ok = ok && landscape.mean[static_cast<std::size_t>(i - m)] <=
                     ids.mean[static_cast<std::size_t>(i)] + 1e-12;
    if (ok) {
      out.found_lower = true;
      out.shift_lower = m;
      out.C6 = std::pow(ratio, -static_cast<double>(m));
    }
  }
  return out;
}

TailEnvelopeFit fit_tail_envelope(const EnsembleCurve& curve,
                                  const DistributionSpec& distribution, int dim,
                                  std::int64_t first, std::int64_t last) {
  if (first < 0 || last < first ||
      last >= static_cast<std::int64_t>(curve.mu.size()))
    throw InvalidParameters("envelope fit window is empty");
  const double d_half = 0.5 * dim;
  std::vector<double> mu, y0;
  for (std::int64_t i = first; i <= last; ++i) {
    const double v = curve.mean[static_cast<std::size_t>(i)];
    if (!(v > 0.0)) throw NonPositiveCurve("envelope fit needs positive means");
    mu.push_back(curve.mu[static_cast<std::size_t>(i)]);
    y0.push_back(std::log(v) - d_half * std::log(curve.mu[static_cast<std::size_t>(i)]));
  }
  if (mu.size() < 3)
    throw InvalidParameters("envelope fit window holds fewer than 3 points");

  TailEnvelopeFit best;
  double best_sse = std::numeric_limits<double>::infinity();
  // c_scale sweep: log F(c mu) must stay finite and negative on the window
  for (int ci = 0; ci < 64; ++ci) {
    const double c = std::pow(10.0, -2.0 + 4.0 * ci / 63.0);
    std::vector<double> x;
    x.reserve(mu.size());
    bool usable = true;
    for (double m : mu) {
      const double arg = std::min(c * m, 1.0);
      const double F = distribution.cdf(arg);
      if (!(F > 0.0) || F >= 1.0) {
        usable = false;
        break;
      }
      x.push_back(std::pow(m, -d_half) * std::log(F));
    }
    if (!usable) continue;
    LinearFit fit;
    try {
      fit = linear_fit(x, y0);
    } catch (const InvalidParameters&) {
      continue;
    }
    if (!(fit.slope > 0.0)) continue;  // gamma_exp must be positive
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y0[i] - (fit.intercept + fit.slope * x[i]);
      sse += r * r;
    }
    if (sse < best_sse) {
      best_sse = sse;
      best.params = {std::exp(fit.intercept), fit.slope, c, dim};
      best.r_squared = fit.r_squared;
    }
  }
  if (best_sse == std::numeric_limits<double>::infinity())
    throw NoFiniteConstant("no admissible envelope fit on the window");
  return best;
}

}  // namespace llab
