#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "llab/counting.hpp"
#include "llab/landscape.hpp"
#include "llab/potential.hpp"

namespace llab {

struct EnsembleConfig {
  DistributionSpec distribution;
  int dim = 1;
  int R0 = 64;
  int n = 8;
  std::int64_t realization_count = 8;
  std::uint64_t base_seed = 1;
  std::vector<double> mu_grid;
  SolveOptions solver;
  std::int64_t dense_dof_limit = kDefaultDenseDofLimit;
  int threads = 1;
  bool compute_ids = true;  // the IDOS needs a dense eigensolve per realization
};

struct EnsembleCurve {
  std::vector<double> mu;
  std::vector<double> mean;
  std::vector<double> stderr_;  // sample sd / sqrt(realizations kept)
  std::int64_t realization_count = 0;
};

struct EnsembleResult {
  EnsembleCurve ids;        // empty mu when compute_ids is off
  EnsembleCurve landscape;  // N_u
  std::vector<std::int64_t> skipped_realizations;  // V identically zero
  std::vector<std::string> realization_checksums;  // SHA-256 of omega payloads
};

// Per realization r: sample omegas with (base_seed, r), assemble V, solve the
// landscape, evaluate both curves. Aggregation runs in realization-index
// order, so the result does not depend on the execution schedule.
EnsembleResult expectation_curves(const EnsembleConfig& config);

// (H(mu) F^mu)^N with H(mu) = (mu^mu (1-mu)^{1-mu})^{-1}; requires F < mu.
double chernoff_bound(double mu_frac, double F_value, std::int64_t N_sites);
double chernoff_log_bound(double mu_frac, double F_value, std::int64_t N_sites);

// P{Bin(N,p) >= k} by stable log-space summation.
double binomial_tail_exact(std::int64_t N, double p, std::int64_t k);

struct TailEnvelopeParams {
  double gamma_pre = 1.0;  // gamma_1 or gamma_3
  double gamma_exp = 1.0;  // gamma_2 or gamma_4
  double c_scale = 1.0;    // c_P or its tilde version
  int dim = 1;
};

// gamma_pre mu^{d/2} F(c_scale mu)^{gamma_exp mu^{-d/2}}, evaluated in log
// space so the mu^{-d/2} exponents cannot underflow intermediates.
double tail_envelope(const TailEnvelopeParams& params,
                     const std::function<double(double)>& F_evaluator, double mu);

struct LifschitzFit {
  double slope = 0.0;
  double r_squared = 0.0;
  // set when |log value| fails to diverge on the window (some value > 1/e):
  // the curve is not in the tail regime and the slope is meaningless
  bool non_tail = false;
};

// Least-squares slope of log|log value| against -log mu over [mu_lo, mu_hi].
LifschitzFit lifschitz_fit(const CountingCurve& curve, double mu_lo,
                           double mu_hi);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Largest contiguous run of grid points with mean > 0 and relative standard
// error below rel_stderr_max; returns [first, last] indices or {-1,-1}.
std::pair<std::int64_t, std::int64_t> tail_window(const EnsembleCurve& curve,
                                                  double rel_stderr_max);

// Two-sided check N_u^E(C6 mu) <= N^E(mu) <= N_u^E(C4 mu) with the
// rescalings restricted to grid shifts (exact on geometric mu grids):
// C4 = ratio^{shift_upper}, C6 = ratio^{-shift_lower}.
struct ExpectationSandwich {
  bool found_upper = false;
  bool found_lower = false;
  std::int64_t shift_upper = 0;
  std::int64_t shift_lower = 0;
  double C4 = 0.0;
  double C6 = 0.0;
};

ExpectationSandwich expectation_sandwich(const EnsembleCurve& ids,
                                         const EnsembleCurve& landscape);

struct TailEnvelopeFit {
  TailEnvelopeParams params;
  double r_squared = 0.0;
};

// Fits (gamma_pre, gamma_exp, c_scale) in log space to the measured curve on
// the window: linear least squares in (log gamma_pre, gamma_exp) for each
// candidate c_scale on a geometric sweep, keeping the best residual.
TailEnvelopeFit fit_tail_envelope(const EnsembleCurve& curve,
                                  const DistributionSpec& distribution, int dim,
                                  std::int64_t first, std::int64_t last);

}  // namespace llab
