#include "llab/lawcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "llab/errors.hpp"

namespace llab {

namespace {

constexpr double kVerdictSlack = 1e-12;

double pow_int(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Index range covering [center - side/2, center + side/2) along one axis,
// center and side in grid-point units; iteration wraps mod N.
struct AxisSpan {
  std::int64_t lo;
  std::int64_t count;
};

AxisSpan centered_span(double center_points, double side_points) {
  const double half = 0.5 * side_points;
  const auto lo = static_cast<std::int64_t>(std::ceil(center_points - half));
  const auto hi = static_cast<std::int64_t>(std::ceil(center_points + half));
  return {lo, hi - lo};
}

// sum of u^2 over the wrapped box; also yields the point count
std::pair<double, std::int64_t> box_sum_sq(const LandscapeField& landscape,
                                           const std::array<double, 3>& center,
                                           double side_points) {
  const TorusGrid& g = landscape.grid;
  const std::int64_t N = g.axis_points();
  const int d = g.dim();
  std::array<AxisSpan, 3> span{AxisSpan{0, 1}, AxisSpan{0, 1}, AxisSpan{0, 1}};
  std::int64_t points = 1;
  for (int a = 0; a < d; ++a) {
    span[a] = centered_span(center[a], side_points);
    points *= span[a].count;
  }
  double acc = 0.0;
  for (std::int64_t i0 = 0; i0 < span[0].count; ++i0) {
    const std::int64_t g0 = g.wrap(span[0].lo + i0);
    for (std::int64_t i1 = 0; i1 < span[1].count; ++i1) {
      const std::int64_t g1 = d > 1 ? g.wrap(span[1].lo + i1) : 0;
      for (std::int64_t i2 = 0; i2 < span[2].count; ++i2) {
        const std::int64_t g2 = d > 2 ? g.wrap(span[2].lo + i2) : 0;
        std::int64_t idx = g0;
        if (d > 1) idx = idx * N + g1;
        if (d > 2) idx = idx * N + g2;
        const double u = landscape.u[static_cast<std::size_t>(idx)];
        acc += u * u;
      }
    }
  }
  return {acc, points};
}

}  // namespace

UpperCheckResult check_upper(const CountingCurve& curve_N,
                             const LandscapeField& landscape, double C4,
                             double mu_lo, double mu_hi) {
  if (!(C4 > 0.0)) throw InvalidParameters("C4 must be positive");
  UpperCheckResult result;
  result.C4 = C4;
  result.all_pass = true;
  for (std::size_t i = 0; i < curve_N.mu.size(); ++i) {
    const double mu = curve_N.mu[i];
    if (mu < mu_lo || mu > mu_hi) continue;
    double rhs;
    try {
      rhs = landscape_count(landscape, C4 * mu);
    } catch (const Error& e) {
      result.excluded.push_back({mu, e.what()});
      continue;
    }
    const double lhs = curve_N.value[i];
    const bool pass = lhs <= rhs + kVerdictSlack * std::max(1.0, rhs);
    result.rows.push_back({mu, lhs, rhs, rhs - lhs, pass});
    result.all_pass = result.all_pass && pass;
  }
  if (result.rows.empty()) result.all_pass = false;
  return result;
}

LowerCheckResult check_lower_general(const CountingCurve& curve_N,
                                     const LandscapeField& landscape,
                                     double alpha, double C1, double C2,
                                     double C3, double mu_lo, double mu_hi) {
  if (!(alpha > 0.0) || !(alpha < 0.0625))
    throw InvalidParameters("alpha must lie in (0, 2^-4)");
  LowerCheckResult result;
  result.alpha = alpha;
  result.C1 = C1;
  result.C2 = C2;
  result.C3 = C3;
  result.all_pass = true;
  for (std::size_t i = 0; i < curve_N.mu.size(); ++i) {
    const double mu = curve_N.mu[i];
    if (mu < mu_lo || mu > mu_hi) continue;
    double lhs;
    try {
      lhs = lower_bound_value(landscape, mu, alpha, C1, C2, C3);
    } catch (const Error& e) {
      result.excluded.push_back({mu, e.what()});
      continue;
    }
    const double rhs = curve_N.value[i];
    const bool pass = lhs <= rhs + kVerdictSlack * std::max(1.0, rhs);
    result.rows.push_back({mu, lhs, rhs, rhs - lhs, pass});
    result.all_pass = result.all_pass && pass;
  }
  return result;
}

LowerConstantFit fit_lower_C1(
    std::span<const std::pair<const CountingCurve*, const LandscapeField*>>
        samples,
    double alpha, double C2, double C3, double mu_lo, double mu_hi,
    double safety) {
  if (!(alpha > 0.0) || !(alpha < 0.0625))
    throw InvalidParameters("alpha must lie in (0, 2^-4)");
  double best = std::numeric_limits<double>::infinity();
  std::int64_t constrained = 0;
  for (const auto& [curve, landscape] : samples) {
    const int d = landscape->grid.dim();
    const double alpha_d = pow_int(alpha, d);
    const double alpha_d2 = pow_int(alpha, d + 2);
    const double alpha_d4 = pow_int(alpha, d + 4);
    for (std::size_t i = 0; i < curve->mu.size(); ++i) {
      const double mu = curve->mu[i];
      if (mu < mu_lo || mu > mu_hi) continue;
      double n1, n2;
      try {
        n1 = landscape_count(*landscape, C2 * alpha_d2 * mu);
        n2 = landscape_count(*landscape, C2 * alpha_d4 * mu);
      } catch (const Error&) {
        continue;
      }
      if (!(n1 > 0.0)) continue;
      ++constrained;
      best = std::min(best, (curve->value[i] + C3 * n2) / (alpha_d * n1));
    }
  }
  if (constrained == 0) return {1.0, 0};
  return {best * safety, constrained};
}

CleanLowerFit fit_constant_lower_clean(const CountingCurve& curve_N,
                                       const LandscapeField& landscape,
                                       double mu_lo, double mu_hi, double C_min,
                                       double C_cap, double rel_tol) {
  auto holds = [&](double C, std::vector<double>* excluded) {
    bool ok = true;
    std::int64_t checked = 0;
    for (std::size_t i = 0; i < curve_N.mu.size(); ++i) {
      const double mu = curve_N.mu[i];
      if (mu < mu_lo || mu > mu_hi) continue;
      double nu_val;
      try {
        nu_val = landscape_count(landscape, C * mu);
      } catch (const Error&) {
        if (excluded) excluded->push_back(mu);
        continue;
      }
      ++checked;
      if (nu_val > curve_N.value[i] + kVerdictSlack * std::max(1.0, nu_val)) {
        ok = false;
        break;
      }
    }
    return ok && checked > 0;
  };

  if (holds(C_cap, nullptr)) {
    CleanLowerFit fit{C_cap, {}};
    holds(C_cap, &fit.excluded_mu);
    return fit;
  }
  double lo = C_cap;
  while (lo > C_min && !holds(lo, nullptr)) lo *= 0.5;
  if (!holds(lo, nullptr))
    throw NoFiniteConstant("N_u(C mu) <= N(mu) fails for every C down to " +
                           std::to_string(C_min));
  double hi = std::min(2.0 * lo, C_cap);
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid, nullptr))
      lo = mid;
    else
      hi = mid;
  }
  CleanLowerFit fit{lo, {}};
  holds(lo, &fit.excluded_mu);
  return fit;
}

DoublingResult check_doubling(const LandscapeField& landscape,
                              std::span<const double> s_values) {
  const TorusGrid& g = landscape.grid;
  const int d = g.dim();
  const std::int64_t N = g.axis_points();
  const double h_d = g.cell_volume();

  DoublingResult result;
  result.C_D_hat = 0.0;
  for (double s : s_values) {
    const auto stride = std::llround(s * g.points_per_unit());
    if (stride < 1)
      throw CubeUnresolvable("doubling scale s = " + std::to_string(s) +
                             " is below one grid cell");
    if (2.0 * s > g.side_length())
      throw CubeUnresolvable("doubled cube of side " + std::to_string(2 * s) +
                             " exceeds the domain");
    const double side_points = s * g.points_per_unit();
    const double s_pow = std::pow(s, d + 4);
    std::array<std::int64_t, 3> c{0, 0, 0};
    for (c[0] = 0; c[0] < N; c[0] += stride) {
      for (c[1] = 0; c[1] < (d > 1 ? N : 1); c[1] += stride) {
        for (c[2] = 0; c[2] < (d > 2 ? N : 1); c[2] += stride) {
          const std::array<double, 3> center{
              static_cast<double>(c[0]), static_cast<double>(c[1]),
              static_cast<double>(c[2])};
          const auto [sum_s, n_s] = box_sum_sq(landscape, center, side_points);
          const auto [sum_2s, n_2s] =
              box_sum_sq(landscape, center, 2.0 * side_points);
          (void)n_s;
          (void)n_2s;
          const double ratio = (h_d * sum_2s) / (h_d * sum_s + s_pow);
          std::int64_t idx = c[0];
          if (d > 1) idx = idx * N + c[1];
          if (d > 2) idx = idx * N + c[2];
          result.rows.push_back({idx, s, ratio});
          result.C_D_hat = std::max(result.C_D_hat, ratio);
        }
      }
    }
  }
  return result;
}

std::vector<MinimaRatioRow> minima_ratio_diagnostic(
    const Spectrum& spectrum, const LandscapeField& landscape, int count) {
  const std::vector<double> W = effective_potential(landscape);
  const MinimaList minima = local_minima(W, landscape.grid);
  const auto available = static_cast<int>(
      std::min<std::size_t>(minima.values.size(), spectrum.eigenvalues.size()));
  if (count > available)
    throw InsufficientMinima("requested " + std::to_string(count) +
                             " rows, only " + std::to_string(available) +
                             " eigenvalue/minimum pairs available");
  const double factor = 1.0 + 0.25 * landscape.grid.dim();
  std::vector<MinimaRatioRow> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double lambda = spectrum.eigenvalues[static_cast<std::size_t>(j)];
    const double w = minima.values[static_cast<std::size_t>(j)];
    rows.push_back({j, lambda, w, lambda / (factor * w)});
  }
  return rows;
}

double moser_harnack_probe(const LandscapeField& landscape,
                           const CubePartition& part) {
  const TorusGrid& g = landscape.grid;
  if (part.grid() != g) throw GridMismatch("partition grid mismatch");
  const int d = g.dim();
  const double l = part.nominal_side();
  if (2.0 * l > g.side_length())
    throw CubeUnresolvable("doubled cube exceeds the domain");
  const std::int64_t m = part.blocks_per_axis();
  const std::int64_t cubes = part.cube_count();

  double c_h = 0.0;
  for (std::int64_t q = 0; q < cubes; ++q) {
    const double sup_u = part.reduce(landscape.u, q, Reduction::max);
    // cube centers in grid-point units, from the per-axis block layout
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::int64_t rest = q;
    for (int a = d - 1; a >= 0; --a) {
      const std::int64_t b = rest % m;
      rest /= m;
      center[a] = static_cast<double>(part.block_start(b) + part.offset()[a]) +
                  0.5 * static_cast<double>(part.block_size(b));
    }
    const auto [sum_2q, n_2q] =
        box_sum_sq(landscape, center, 2.0 * l * g.points_per_unit());
    const double mean_sq = sum_2q / static_cast<double>(n_2q);
    c_h = std::max(c_h, sup_u / (std::sqrt(mean_sq) + l * l));
  }
  return c_h;
}

namespace {

nlohmann::json rows_json(const std::vector<LawVerdictRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"mu", r.mu},
                   {"lhs", r.lhs},
                   {"rhs", r.rhs},
                   {"slack", r.slack},
                   {"pass", r.pass}});
  return arr;
}

nlohmann::json excluded_json(const std::vector<LawExcludedRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"mu", r.mu}, {"reason", r.reason}});
  return arr;
}

}  // namespace

std::string law_report_json(const LawReport& report) {
  nlohmann::json j;
  j["schema"] = "llab-lawreport/1";
  j["upper"] = {{"C4", report.upper.C4},
                {"all_pass", report.upper.all_pass},
                {"rows", rows_json(report.upper.rows)},
                {"excluded", excluded_json(report.upper.excluded)}};
  j["lower"] = {{"alpha", report.lower.alpha},
                {"C1", report.lower.C1},
                {"C2", report.lower.C2},
                {"C3", report.lower.C3},
                {"all_pass", report.lower.all_pass},
                {"rows", rows_json(report.lower.rows)},
                {"excluded", excluded_json(report.lower.excluded)}};
  j["clean_lower"] = {{"C2_prime", report.clean_lower.C2_prime},
                      {"excluded_mu", report.clean_lower.excluded_mu}};
  nlohmann::json doubling_rows = nlohmann::json::array();
  for (const auto& r : report.doubling.rows)
    doubling_rows.push_back({{"center", r.center}, {"s", r.s}, {"ratio", r.ratio}});
  j["doubling"] = {{"C_D_hat", report.doubling.C_D_hat}, {"rows", doubling_rows}};
  j["harnack"] = {{"C_H_hat", report.C_H_hat}};
  nlohmann::json ratios = nlohmann::json::array();
  for (const auto& r : report.minima_ratios)
    ratios.push_back({{"index", r.index},
                      {"eigenvalue", r.eigenvalue},
                      {"minimum", r.minimum},
                      {"ratio", r.ratio}});
  j["minima_ratios"] = ratios;
  j["provenance"] = {{"potential_sha256", report.potential_sha256},
                     {"config_sha256", report.config_sha256},
                     {"seed", report.seed},
                     {"solver_tolerance", report.solver_tolerance},
                     {"solver_residual", report.solver_residual},
                     {"solver_iterations", report.solver_iterations}};
  return j.dump(2) + "\n";
}

std::string law_report_text(const LawReport& report) {
  std::ostringstream out;
  char buf[160];
  out << "landscape law report\n";
  std::snprintf(buf, sizeof buf,
                "  upper bound  N(mu) <= N_u(C4 mu)    C4 = %-12.6g %s\n",
                report.upper.C4, report.upper.all_pass ? "PASS" : "FAIL");
  out << buf;
  std::snprintf(buf, sizeof buf,
                "  lower bound  (alpha = %g, C1 = %.6g, C2 = %.6g, C3 = %.6g)  %s\n",
                report.lower.alpha, report.lower.C1, report.lower.C2,
                report.lower.C3, report.lower.all_pass ? "PASS" : "FAIL");
  out << buf;
  std::snprintf(buf, sizeof buf,
                "  clean lower  N_u(C2' mu) <= N(mu)   C2' = %.6g\n",
                report.clean_lower.C2_prime);
  out << buf;
  std::snprintf(buf, sizeof buf, "  doubling     C_D_hat = %.6g over %zu cubes\n",
                report.doubling.C_D_hat, report.doubling.rows.size());
  out << buf;
  std::snprintf(buf, sizeof buf, "  harnack      C_H_hat = %.6g\n", report.C_H_hat);
  out << buf;
  out << "  minima ratios lambda_j / ((1+d/4) w_j):\n";
  for (const auto& r : report.minima_ratios) {
    std::snprintf(buf, sizeof buf, "    j=%-3d lambda=%-14.8g w=%-14.8g ratio=%.6g\n",
                  r.index, r.eigenvalue, r.minimum, r.ratio);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "  verdict rows: %zu upper, %zu lower; excluded: %zu upper, %zu lower\n",
                report.upper.rows.size(), report.lower.rows.size(),
                report.upper.excluded.size(), report.lower.excluded.size());
  out << buf;
  return out.str();
}

}  // namespace llab
