#include "llab/landscape.hpp"

#include <algorithm>
#include <cmath>

#include "llab/errors.hpp"
#include "llab/kernels.hpp"

namespace llab {

LandscapeField solve_landscape(const DiscreteOperator& op,
                               const SolveOptions& options) {
  const TorusGrid& g = op.grid();
  const auto n = static_cast<std::size_t>(g.total_points());
  if (op.max_potential() <= 0.0)
    throw SingularOperator(
        "V is identically zero: constants lie in the kernel of -Delta, "
        "Lu = 1 has no solution on the torus");
  if (!(options.tolerance > 0.0))
    throw InvalidParameters("solver tolerance must be positive");

  const auto& k = kernels::active();
  const std::int64_t max_iter =
      options.max_iterations > 0
          ? options.max_iterations
          : std::max<std::int64_t>(10000, 10 * g.total_points());

  const double inv_h2 =
      static_cast<double>(g.points_per_unit()) * g.points_per_unit();
  std::vector<double> inv_diag(n);
  if (options.jacobi_preconditioner) {
    const auto V = op.potential();
    const double diag0 = 2.0 * g.dim() * inv_h2;
    for (std::size_t i = 0; i < n; ++i) inv_diag[i] = 1.0 / (diag0 + V[i]);
  } else {
    std::fill(inv_diag.begin(), inv_diag.end(), 1.0);
  }

  std::vector<double> x(n, 0.0), r(n, 1.0), z(n), p(n), q(n);
  const double b_norm = std::sqrt(static_cast<double>(n));

  k.mul(r.data(), inv_diag.data(), z.data(), n);
  p = z;
  double rz = k.dot(r.data(), z.data(), n);
  double rel = 1.0;
  std::int64_t it = 0;
  while (rel > options.tolerance) {
    if (++it > max_iter)
      throw NotConverged("CG did not reach " + std::to_string(options.tolerance) +
                         " within " + std::to_string(max_iter) + " iterations");
    op.apply(p, q);
    const double pq = k.dot(p.data(), q.data(), n);
    const double alpha = rz / pq;
    k.axpy(alpha, p.data(), x.data(), n);
    k.axpy(-alpha, q.data(), r.data(), n);
    rel = std::sqrt(k.dot(r.data(), r.data(), n)) / b_norm;
    if (rel <= options.tolerance) break;
    k.mul(r.data(), inv_diag.data(), z.data(), n);
    const double rz_next = k.dot(r.data(), z.data(), n);
    k.xpay(z.data(), rz_next / rz, p.data(), n);
    rz = rz_next;
  }

  // true residual, not the recurrence estimate
  op.apply(x, q);
  double rr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = 1.0 - q[i];
    rr += d * d;
  }
  return LandscapeField{g, std::move(x), std::sqrt(rr) / b_norm, it, "{}"};
}

std::vector<double> effective_potential(const LandscapeField& landscape) {
  const auto n = landscape.u.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!(landscape.u[i] > 0.0))
      throw NonPositiveLandscape("u must be positive everywhere to form 1/u");
  std::vector<double> w(n);
  kernels::active().reciprocal(landscape.u.data(), w.data(), n);
  return w;
}

MinimaList local_minima(std::span<const double> W, const TorusGrid& grid) {
  const std::int64_t total = grid.total_points();
  if (static_cast<std::int64_t>(W.size()) != total)
    throw GridMismatch("local_minima: field size does not match grid");
  const int d = grid.dim();

  std::vector<char> visited(static_cast<std::size_t>(W.size()), 0);
  MinimaList out;
  std::vector<std::int64_t> stack, component;
  for (std::int64_t start = 0; start < total; ++start) {
    if (visited[static_cast<std::size_t>(start)]) continue;
    const double v = W[static_cast<std::size_t>(start)];
    // flood the equal-value component; reject it if any member touches a
    // strictly smaller neighbour
    bool is_min = true;
    stack.assign(1, start);
    component.clear();
    visited[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const std::int64_t i = stack.back();
      stack.pop_back();
      component.push_back(i);
      for (int axis = 0; axis < d; ++axis) {
        for (int step : {-1, 1}) {
          const std::int64_t j = grid.neighbor(i, axis, step);
          const double wj = W[static_cast<std::size_t>(j)];
          if (wj < v) is_min = false;
          if (wj == v && !visited[static_cast<std::size_t>(j)]) {
            visited[static_cast<std::size_t>(j)] = 1;
            stack.push_back(j);
          }
        }
      }
    }
    if (is_min) {
      out.values.push_back(v);
      out.representatives.push_back(
          *std::min_element(component.begin(), component.end()));
    }
  }

  std::vector<std::size_t> order(out.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out.values[a] != out.values[b]) return out.values[a] < out.values[b];
    return out.representatives[a] < out.representatives[b];
  });
  MinimaList sorted;
  sorted.values.reserve(order.size());
  sorted.representatives.reserve(order.size());
  for (std::size_t i : order) {
    sorted.values.push_back(out.values[i]);
    sorted.representatives.push_back(out.representatives[i]);
  }
  return sorted;
}

double ground_state_identity_residual(const DiscreteOperator& op,
                                      const LandscapeField& landscape,
                                      std::span<const double> f) {
  const TorusGrid& g = op.grid();
  const std::int64_t total = g.total_points();
  if (landscape.grid != g || static_cast<std::int64_t>(f.size()) != total)
    throw GridMismatch("identity residual: grid mismatch");

  const double lhs = op.quadratic_form(f);

  const auto& u = landscape.u;
  std::vector<double> gq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) gq[i] = f[i] / u[i];

  double edge_term = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    std::int64_t stride = 1;
    for (int a = g.dim() - 1; a > axis; --a) stride *= g.axis_points();
    const std::int64_t span_len = stride * g.axis_points();
    for (std::int64_t i = 0; i < total; ++i) {
      const std::int64_t block = (i / span_len) * span_len;
      const std::int64_t j = block + (i - block + stride) % span_len;
      const double dg = gq[static_cast<std::size_t>(i)] - gq[static_cast<std::size_t>(j)];
      edge_term += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)] * dg * dg;
    }
  }
  double well_term = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) well_term += f[i] * gq[i];

  const double h = g.spacing();
  double h_dm2 = 1.0 / (h * h);  // h^{d-2}
  double h_d = 1.0;              // h^d
  for (int a = 0; a < g.dim(); ++a) {
    h_dm2 *= h;
    h_d *= h;
  }
  const double rhs = h_dm2 * edge_term + h_d * well_term;
  return std::abs(lhs - rhs) / std::abs(lhs);
}

}  // namespace llab
