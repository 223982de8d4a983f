#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <utility>

#include <json.hpp>

#include "llab/counting.hpp"
#include "llab/discrete_operator.hpp"
#include "llab/errors.hpp"
#include "llab/field_io.hpp"
#include "llab/landscape.hpp"
#include "llab/lawcheck.hpp"
#include "llab/potential.hpp"
#include "llab/run_config.hpp"
#include "llab/stochastic.hpp"

namespace llab {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunContext {
  const RunConfig& cfg;
  fs::path out_dir;
  std::string config_hash;

  fs::path path(const std::string& name) const { return out_dir / name; }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(path(name), std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + (out_dir / name).string());
    return f;
  }

  void write_json(const std::string& name, const nlohmann::json& j) const {
    auto f = open(name);
    f << j.dump(2) << '\n';
  }
};

struct PreparedPotential {
  PotentialField field;
  std::string payload_hash;
  bool generated = true;
};

PreparedPotential build_potential(const RunContext& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.potential.source == "file") {
    FieldRecord rec = load_field(cfg.potential.path);
    if (rec.kind != "potential")
      throw FormatError("expected a potential field, got kind '" + rec.kind +
                        "'");
    TorusGrid grid = build_grid(rec.dim, rec.R0, rec.n);
    if (static_cast<std::int64_t>(rec.values.size()) != grid.total_points())
      throw FormatError("field payload does not match its grid descriptor");
    PreparedPotential out{
        PotentialField{grid, std::move(rec.values), std::move(rec.omegas),
                       rec.provenance},
        "", false};
    FieldRecord hashed{"potential", rec.dim, rec.R0, rec.n, "{}",
                       out.field.values, out.field.omegas};
    out.payload_hash = payload_sha256(hashed);
    return out;
  }

  const TorusGrid grid = build_grid(cfg.dim, cfg.R0, cfg.n);
  PotentialField field = [&] {
    if (cfg.potential.source == "constant") {
      PotentialField f = constant_potential(grid, cfg.potential.constant_c);
      nlohmann::json prov = {{"preset", "constant"},
                             {"c", cfg.potential.constant_c},
                             {"config_sha256", ctx.config_hash}};
      f.provenance = prov.dump();
      return f;
    }
    const DistributionSpec dist =
        DistributionSpec::parse(cfg.potential.distribution);
    const auto omegas = sample_omegas(dist, site_count(grid),
                                      cfg.potential.seed,
                                      cfg.potential.realization);
    nlohmann::json prov = {{"distribution", dist.tag()},
                           {"seed", cfg.potential.seed},
                           {"realization", cfg.potential.realization},
                           {"config_sha256", ctx.config_hash}};
    return assemble_anderson(grid, omegas, prov.dump());
  }();
  FieldRecord rec{"potential", grid.dim(), grid.side_length(),
                  grid.points_per_unit(), "{}", field.values, field.omegas};
  std::string hash = payload_sha256(rec);
  return PreparedPotential{std::move(field), std::move(hash), true};
}

void save_potential(const RunContext& ctx, const PreparedPotential& p) {
  FieldRecord rec{"potential",
                  p.field.grid.dim(),
                  p.field.grid.side_length(),
                  p.field.grid.points_per_unit(),
                  p.field.provenance,
                  p.field.values,
                  p.field.omegas};
  save_field(ctx.path("potential.fld"), rec);
}

void save_landscape(const RunContext& ctx, const LandscapeField& u,
                    const std::string& potential_hash, double tolerance) {
  nlohmann::json prov = {{"potential_sha256", potential_hash},
                         {"residual", u.residual_norm},
                         {"iterations", u.iterations},
                         {"tolerance", tolerance},
                         {"config_sha256", ctx.config_hash}};
  FieldRecord rec{"landscape",
                  u.grid.dim(),
                  u.grid.side_length(),
                  u.grid.points_per_unit(),
                  prov.dump(),
                  u.u,
                  {}};
  save_field(ctx.path("landscape.fld"), rec);
}

// smallest mu with an admissible partition, with a little slack so that
// floor(R0 sqrt(mu)) >= 1 survives rounding
double smallest_admissible_mu(const TorusGrid& grid) {
  const double r0 = grid.side_length();
  return (1.0 + 1e-9) / (r0 * r0);
}

double largest_resolvable_mu(const TorusGrid& grid) {
  const double n = grid.points_per_unit();
  return n * n;
}

std::vector<double> resolve_mu_grid(const RunContext& ctx,
                                    const TorusGrid& grid,
                                    bool needs_partitions) {
  const MuGridConfig& mu = ctx.cfg.mu;
  if (mu.kind == "list") return mu.values;
  if (mu.kind == "linear") return linear_mu_grid(mu.min, mu.max, mu.points);
  if (mu.kind == "geometric")
    return geometric_mu_grid(mu.min, mu.max, mu.points_per_decade);
  // auto: geometric grid over the admissible window
  const double lo =
      needs_partitions ? smallest_admissible_mu(grid) : 1e-3;
  const double hi = needs_partitions
                        ? std::min(50.0, largest_resolvable_mu(grid))
                        : 50.0;
  return geometric_mu_grid(lo, hi, mu.points_per_decade);
}

void write_curve_with_hash(const RunContext& ctx, const std::string& name,
                           const CountingCurve& curve) {
  auto f = ctx.open(name);
  f << "# config_sha256 " << ctx.config_hash << '\n';
  write_curve_csv(f, curve);
}

LandscapeField solve_with_config(const RunContext& ctx,
                                 const DiscreteOperator& op) {
  SolveOptions opt;
  opt.tolerance = ctx.cfg.solver_tolerance;
  opt.max_iterations = ctx.cfg.solver_max_iterations;
  return solve_landscape(op, opt);
}

void run_gen_potential(const RunContext& ctx) {
  save_potential(ctx, build_potential(ctx));
}

void run_landscape(const RunContext& ctx) {
  PreparedPotential p = build_potential(ctx);
  if (p.generated) save_potential(ctx, p);
  const std::string hash = p.payload_hash;
  DiscreteOperator op(std::move(p.field));
  const LandscapeField u = solve_with_config(ctx, op);
  save_landscape(ctx, u, hash, ctx.cfg.solver_tolerance);
}

void run_spectrum(const RunContext& ctx) {
  PreparedPotential p = build_potential(ctx);
  if (p.generated) save_potential(ctx, p);
  DiscreteOperator op(std::move(p.field));
  if (ctx.cfg.dump_matrix) {
    auto f = ctx.open("matrix.txt");
    f << "# config_sha256 " << ctx.config_hash << '\n';
    op.write_coordinate_matrix(f);
  }
  const Spectrum spec = op.eigen_dense(ctx.cfg.dense_dof_limit);
  auto f = ctx.open("spectrum.csv");
  f << "# config_sha256 " << ctx.config_hash << '\n';
  f << "index,eigenvalue\n";
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
    f << i << ',' << fmt17(spec.eigenvalues[i]) << '\n';
}

void run_curves(const RunContext& ctx) {
  PreparedPotential p = build_potential(ctx);
  if (p.generated) save_potential(ctx, p);
  const std::string pot_hash = p.payload_hash;
  const TorusGrid grid = p.field.grid;
  const std::vector<double> V = p.field.values;
  DiscreteOperator op(std::move(p.field));
  const Spectrum spec = op.eigen_dense(ctx.cfg.dense_dof_limit);
  const LandscapeField u = solve_with_config(ctx, op);
  save_landscape(ctx, u, pot_hash, ctx.cfg.solver_tolerance);
  const std::vector<double> W = effective_potential(u);

  const std::vector<double> mu = resolve_mu_grid(ctx, grid, true);
  const CountingCurve N = ids_curve(spec, mu, grid);
  const CountingCurve Nu = landscape_curve(u, mu);
  const CountingCurve NV = weyl_curve(V, grid, mu, "weyl_V");
  const CountingCurve NW = weyl_curve(W, grid, mu, "weyl_W");

  auto f = ctx.open("curves.csv");
  f << "# config_sha256 " << ctx.config_hash << '\n';
  f << "mu,N,N_u,N_V,N_W\n";
  for (std::size_t i = 0; i < mu.size(); ++i)
    f << fmt17(mu[i]) << ',' << fmt17(N.value[i]) << ',' << fmt17(Nu.value[i])
      << ',' << fmt17(NV.value[i]) << ',' << fmt17(NW.value[i]) << '\n';
}

void run_lawcheck(const RunContext& ctx) {
  PreparedPotential p = build_potential(ctx);
  if (p.generated) save_potential(ctx, p);
  const std::string pot_hash = p.payload_hash;
  const TorusGrid grid = p.field.grid;
  DiscreteOperator op(std::move(p.field));
  const Spectrum spec = op.eigen_dense(ctx.cfg.dense_dof_limit);
  const LandscapeField u = solve_with_config(ctx, op);
  save_landscape(ctx, u, pot_hash, ctx.cfg.solver_tolerance);

  const std::vector<double> mu = resolve_mu_grid(ctx, grid, true);
  const double mu_lo = mu.front(), mu_hi = mu.back();
  const CountingCurve N = ids_curve(spec, mu, grid);

  LawReport report;
  report.potential_sha256 = pot_hash;
  report.config_sha256 = ctx.config_hash;
  report.seed = ctx.cfg.potential.seed;
  report.solver_tolerance = ctx.cfg.solver_tolerance;
  report.solver_residual = u.residual_norm;
  report.solver_iterations = u.iterations;

  double C4 = ctx.cfg.C4;
  if (C4 <= 0.0)
    C4 = fit_constant_upper(N, u, mu_lo, mu_hi, ctx.cfg.C_max).C4;
  report.upper = check_upper(N, u, C4, mu_lo, mu_hi);

  const double alpha = ctx.cfg.alpha;
  const int d = grid.dim();
  double C2 = ctx.cfg.C2;
  if (C2 <= 0.0) {
    // first inner scale C2 alpha^{d+2} mu = mu/4, which keeps both rescaled
    // arguments admissible over a usable window on desk-scale grids
    C2 = 0.25 * std::pow(alpha, -(d + 2));
  }
  double C1 = ctx.cfg.C1;
  if (C1 <= 0.0) {
    const std::pair<const CountingCurve*, const LandscapeField*> sample{&N, &u};
    C1 = fit_lower_C1({&sample, 1}, alpha, C2, ctx.cfg.C3, mu_lo, mu_hi, 0.999)
             .C1;
  }
  report.lower =
      check_lower_general(N, u, alpha, C1, C2, ctx.cfg.C3, mu_lo, mu_hi);
  try {
    report.clean_lower = fit_constant_lower_clean(N, u, mu_lo, mu_hi);
  } catch (const NoFiniteConstant&) {
    report.clean_lower = {0.0, {}};
  }
  report.doubling = check_doubling(u, ctx.cfg.doubling_s);
  try {
    report.C_H_hat = moser_harnack_probe(u, partition(grid, 1.0));
  } catch (const Error&) {
    report.C_H_hat = 0.0;  // domain too small for the doubled cube
  }
  {
    const std::vector<double> W = effective_potential(u);
    const auto minima = local_minima(W, grid);
    const int avail = static_cast<int>(
        std::min<std::size_t>(minima.values.size(), spec.eigenvalues.size()));
    report.minima_ratios = minima_ratio_diagnostic(
        spec, u, std::min(ctx.cfg.minima_count, avail));
  }

  ctx.open("lawreport.json") << law_report_json(report);
  auto f = ctx.open("lawreport.txt");
  f << "# config_sha256 " << ctx.config_hash << '\n' << law_report_text(report);
}

void run_doubling(const RunContext& ctx) {
  PreparedPotential p = build_potential(ctx);
  if (p.generated) save_potential(ctx, p);
  const std::string pot_hash = p.payload_hash;
  DiscreteOperator op(std::move(p.field));
  const LandscapeField u = solve_with_config(ctx, op);
  const DoublingResult res = check_doubling(u, ctx.cfg.doubling_s);
  nlohmann::json j;
  j["schema"] = "llab-doubling/1";
  j["config_sha256"] = ctx.config_hash;
  j["potential_sha256"] = pot_hash;
  j["C_D_hat"] = res.C_D_hat;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : res.rows)
    rows.push_back({{"center", r.center}, {"s", r.s}, {"ratio", r.ratio}});
  j["rows"] = rows;
  ctx.write_json("doubling.json", j);
}

void run_ensemble(const RunContext& ctx) {
  const TorusGrid grid = build_grid(ctx.cfg.dim, ctx.cfg.R0, ctx.cfg.n);
  EnsembleConfig ecfg;
  ecfg.distribution = DistributionSpec::parse(ctx.cfg.potential.distribution);
  ecfg.dim = ctx.cfg.dim;
  ecfg.R0 = ctx.cfg.R0;
  ecfg.n = ctx.cfg.n;
  ecfg.realization_count = ctx.cfg.realizations;
  ecfg.base_seed = ctx.cfg.base_seed;
  ecfg.mu_grid = resolve_mu_grid(ctx, grid, true);
  ecfg.solver.tolerance = ctx.cfg.solver_tolerance;
  ecfg.solver.max_iterations = ctx.cfg.solver_max_iterations;
  ecfg.dense_dof_limit = ctx.cfg.dense_dof_limit;
  ecfg.threads = ctx.cfg.threads;

  const EnsembleResult res = expectation_curves(ecfg);

  auto curve_json = [](const EnsembleCurve& c) {
    return nlohmann::json{{"mu", c.mu},
                          {"mean", c.mean},
                          {"stderr", c.stderr_},
                          {"realizations", c.realization_count}};
  };
  nlohmann::json j;
  j["schema"] = "llab-ensemble/1";
  j["config"] = ctx.cfg.to_json();
  j["config_sha256"] = ctx.config_hash;
  j["distribution"] = ecfg.distribution.tag();
  j["skipped_realizations"] = res.skipped_realizations;
  j["realization_checksums"] = res.realization_checksums;
  j["N"] = curve_json(res.ids);
  j["N_u"] = curve_json(res.landscape);

  // tail envelope fits: same functional form on both expectation curves,
  // constants refitted per curve, with the gamma_pre range that brackets
  // the data on the window (the constants themselves are existential)
  auto envelope_json = [&](const EnsembleCurve& curve) -> nlohmann::json {
    const auto [first, last] = tail_window(curve, 0.3);
    if (first < 0 || last - first < 2)
      return {{"error", "no usable tail window"}};
    try {
      const TailEnvelopeFit fit =
          fit_tail_envelope(curve, ecfg.distribution, ecfg.dim, first, last);
      double lo = 0.0, hi = 0.0;  // log-residual extremes
      for (std::int64_t i = first; i <= last; ++i) {
        const double model = tail_envelope(
            fit.params,
            [&](double d) { return ecfg.distribution.cdf(std::min(d, 1.0)); },
            curve.mu[static_cast<std::size_t>(i)]);
        const double r =
            std::log(curve.mean[static_cast<std::size_t>(i)] / model);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      return {{"gamma_pre", fit.params.gamma_pre},
              {"gamma_exp", fit.params.gamma_exp},
              {"c_scale", fit.params.c_scale},
              {"r_squared", fit.r_squared},
              {"bracket_gamma_pre",
               {fit.params.gamma_pre * std::exp(lo),
                fit.params.gamma_pre * std::exp(hi)}},
              {"window",
               {curve.mu[static_cast<std::size_t>(first)],
                curve.mu[static_cast<std::size_t>(last)]}}};
    } catch (const Error& e) {
      return {{"error", e.what()}};
    }
  };
  j["envelope_fit_Nu"] = envelope_json(res.landscape);
  if (!res.ids.mu.empty()) {
    j["envelope_fit_N"] = envelope_json(res.ids);
    try {
      const ExpectationSandwich sw =
          expectation_sandwich(res.ids, res.landscape);
      j["expectation_sandwich"] = {
          {"found_upper", sw.found_upper}, {"C4", sw.C4},
          {"found_lower", sw.found_lower}, {"C6", sw.C6},
          {"shift_upper", sw.shift_upper}, {"shift_lower", sw.shift_lower}};
    } catch (const Error& e) {
      j["expectation_sandwich"] = {{"error", e.what()}};
    }
  }
  ctx.write_json("ensemble.json", j);

  auto to_curve = [](const EnsembleCurve& c) {
    CountingCurve out;
    out.kind = "ensemble_mean";
    out.mu = c.mu;
    out.value = c.mean;
    out.stderr_ = c.stderr_;
    return out;
  };
  write_curve_with_hash(ctx, "ensemble_Nu.csv", to_curve(res.landscape));
  if (!res.ids.mu.empty())
    write_curve_with_hash(ctx, "ensemble_N.csv", to_curve(res.ids));
}

void run_figure1(const RunContext& ctx) {
  PreparedPotential p = build_potential(ctx);
  if (p.generated) save_potential(ctx, p);
  const std::string pot_hash = p.payload_hash;
  const TorusGrid grid = p.field.grid;
  const std::vector<double> V = p.field.values;
  DiscreteOperator op(std::move(p.field));
  const Spectrum spec = op.eigen_dense(ctx.cfg.dense_dof_limit);
  const LandscapeField u = solve_with_config(ctx, op);
  save_landscape(ctx, u, pot_hash, ctx.cfg.solver_tolerance);
  const std::vector<double> W = effective_potential(u);

  std::vector<double> mu;
  if (ctx.cfg.mu.kind == "auto") {
    // linear grid through the lower half of the spectrum
    const double mu_half =
        spec.eigenvalues[spec.eigenvalues.size() / 2] * 1.02;
    mu = linear_mu_grid(0.0, mu_half, 512);
  } else {
    mu = resolve_mu_grid(ctx, grid, false);
  }

  // unnormalized counts, per the figure convention
  const double vol = grid.volume();
  auto f = ctx.open("figure1.csv");
  f << "# config_sha256 " << ctx.config_hash << '\n';
  f << "mu,N,N_V,N_W\n";
  for (double m : mu) {
    const double N = static_cast<double>(spec.count_below(m));
    const double NV = weyl_predictor(V, grid, m) * vol;
    const double NW = weyl_predictor(W, grid, m) * vol;
    f << fmt17(m) << ',' << fmt17(N) << ',' << fmt17(NV) << ',' << fmt17(NW)
      << '\n';
  }
}

}  // namespace

void run_experiment(const RunConfig& cfg) {
  cfg.validate();
  RunContext ctx{cfg, fs::path(cfg.output_dir), cfg.config_sha256()};
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) throw IoError("cannot create output dir: " + ec.message());

  nlohmann::json echo = cfg.to_json();
  echo["config_sha256"] = ctx.config_hash;
  ctx.write_json("config_echo.json", echo);

  if (cfg.experiment == "gen-potential") run_gen_potential(ctx);
  else if (cfg.experiment == "landscape") run_landscape(ctx);
  else if (cfg.experiment == "spectrum") run_spectrum(ctx);
  else if (cfg.experiment == "curves") run_curves(ctx);
  else if (cfg.experiment == "lawcheck") run_lawcheck(ctx);
  else if (cfg.experiment == "doubling") run_doubling(ctx);
  else if (cfg.experiment == "ensemble") run_ensemble(ctx);
  else if (cfg.experiment == "figure1") run_figure1(ctx);
  else throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace llab
