#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "llab/counting.hpp"
#include "llab/landscape.hpp"

namespace llab {

struct LawVerdictRow {
  double mu = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs; nonnegative on pass
  bool pass = false;
};

struct LawExcludedRow {
  double mu = 0.0;
  std::string reason;
};

struct UpperCheckResult {
  double C4 = 1.0;
  std::vector<LawVerdictRow> rows;
  std::vector<LawExcludedRow> excluded;
  bool all_pass = false;
};

// N(mu) <= N_u(C4 mu) per mu; rows whose rescaled scale is not admissible on
// this grid are excluded and listed.
UpperCheckResult check_upper(const CountingCurve& curve_N,
                             const LandscapeField& landscape, double C4,
                             double mu_lo, double mu_hi);

struct LowerCheckResult {
  double alpha = 1.0 / 32.0;
  double C1 = 1.0, C2 = 1.0, C3 = 1.0;
  std::vector<LawVerdictRow> rows;
  std::vector<LawExcludedRow> excluded;
  bool all_pass = false;
};

// C1 alpha^d N_u(C2 alpha^{d+2} mu) - C3 N_u(C2 alpha^{d+4} mu) <= N(mu).
LowerCheckResult check_lower_general(const CountingCurve& curve_N,
                                     const LandscapeField& landscape,
                                     double alpha, double C1, double C2,
                                     double C3, double mu_lo, double mu_hi);

struct LowerConstantFit {
  double C1 = 1.0;
  std::int64_t constrained_rows = 0;  // rows where the first term was active
};

// Largest C1 such that the general lower bound holds on every admissible row
// of every sample, scaled by safety; the pilot tool for freezing constants.
LowerConstantFit fit_lower_C1(
    std::span<const std::pair<const CountingCurve*, const LandscapeField*>>
        samples,
    double alpha, double C2, double C3, double mu_lo, double mu_hi,
    double safety = 1.0);

struct CleanLowerFit {
  double C2_prime = 0.0;
  std::vector<double> excluded_mu;
};

// Largest C with N_u(C mu) <= N(mu) on the range (the doubling-case form),
// searched over [C_min, C_cap] by bisection.
CleanLowerFit fit_constant_lower_clean(const CountingCurve& curve_N,
                                       const LandscapeField& landscape,
                                       double mu_lo, double mu_hi,
                                       double C_min = 1e-3, double C_cap = 10.0,
                                       double rel_tol = 1e-3);

struct DoublingRow {
  std::int64_t center = 0;  // linear grid index
  double s = 0.0;
  double ratio = 0.0;
};

struct DoublingResult {
  double C_D_hat = 0.0;
  std::vector<DoublingRow> rows;
};

// C_D_hat = max over grid-aligned centers (stride = s) and scales s of
//   int_{Q_{2s}} u^2 / (int_{Q_s} u^2 + s^{d+4}),
// integrals as h^d Riemann sums with periodic wrap.
DoublingResult check_doubling(const LandscapeField& landscape,
                              std::span<const double> s_values);

struct MinimaRatioRow {
  int index = 0;
  double eigenvalue = 0.0;
  double minimum = 0.0;  // j-th smallest local minimum of 1/u
  double ratio = 0.0;    // lambda_j / ((1 + d/4) w_j)
};

// Report-only: the near-equality (1 + d/4) w_j ~ lambda_j has known
// counterexamples, so nothing is asserted here.
std::vector<MinimaRatioRow> minima_ratio_diagnostic(
    const Spectrum& spectrum, const LandscapeField& landscape, int count);

// Report-only probe: max over partition cubes of
//   sup_Q u / [ (avg_{2Q} u^2)^{1/2} + l(Q)^2 ].
double moser_harnack_probe(const LandscapeField& landscape,
                           const CubePartition& part);

struct LawReport {
  UpperCheckResult upper;
  LowerCheckResult lower;
  CleanLowerFit clean_lower;
  DoublingResult doubling;
  double C_H_hat = 0.0;
  std::vector<MinimaRatioRow> minima_ratios;
  // provenance
  std::string potential_sha256;
  std::string config_sha256;
  std::uint64_t seed = 0;
  double solver_tolerance = 0.0;
  double solver_residual = 0.0;
  std::int64_t solver_iterations = 0;
};

std::string law_report_json(const LawReport& report);
std::string law_report_text(const LawReport& report);

}  // namespace llab
