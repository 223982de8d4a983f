#include "llab/discrete_operator.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "llab/errors.hpp"
#include "llab/kernels.hpp"

namespace llab {

double Spectrum::comparison_tolerance() const {
  if (eigenvalues.empty()) return 0.0;
  const double radius =
      std::max(std::abs(eigenvalues.front()), std::abs(eigenvalues.back()));
  return 1e-9 * radius;
}

std::int64_t Spectrum::count_below(double mu) const {
  if (eigenvalues.empty()) throw EmptySpectrum("spectrum has no eigenvalues");
  const double cut = mu + comparison_tolerance();
  return std::upper_bound(eigenvalues.begin(), eigenvalues.end(), cut) -
         eigenvalues.begin();
}

DiscreteOperator::DiscreteOperator(PotentialField potential)
    : potential_(std::move(potential)) {
  if (static_cast<std::int64_t>(potential_.values.size()) !=
      potential_.grid.total_points())
    throw GridMismatch("potential values do not match grid size");
  min_potential_ = kernels::active().min(potential_.values.data(),
                                         potential_.values.size());
  max_potential_ = kernels::active().max(potential_.values.data(),
                                         potential_.values.size());
  if (min_potential_ < 0.0)
    throw InvalidParameters("potential must be nonnegative");
}

void DiscreteOperator::apply(std::span<const double> f,
                             std::span<double> out) const {
  const TorusGrid& g = grid();
  if (static_cast<std::int64_t>(f.size()) != g.total_points() ||
      out.size() != f.size())
    throw GridMismatch("apply: field size does not match operator grid");
  const double inv_h2 =
      static_cast<double>(g.points_per_unit()) * g.points_per_unit();
  const auto& k = kernels::active();
  switch (g.dim()) {
    case 1:
      k.stencil_1d(f.data(), potential_.values.data(), inv_h2, g.axis_points(),
                   out.data());
      break;
    case 2:
      k.stencil_2d(f.data(), potential_.values.data(), inv_h2, g.axis_points(),
                   out.data());
      break;
    default:
      k.stencil_3d(f.data(), potential_.values.data(), inv_h2, g.axis_points(),
                   out.data());
      break;
  }
}

double DiscreteOperator::inner(std::span<const double> f,
                               std::span<const double> g) const {
  if (f.size() != g.size() ||
      static_cast<std::int64_t>(f.size()) != grid().total_points())
    throw GridMismatch("inner: field size does not match operator grid");
  return grid().cell_volume() * kernels::active().dot(f.data(), g.data(), f.size());
}

double DiscreteOperator::quadratic_form(std::span<const double> f) const {
  std::vector<double> lf(f.size());
  apply(f, lf);
  return inner(lf, f);
}

double DiscreteOperator::quadratic_form_edges(std::span<const double> f) const {
  const TorusGrid& g = grid();
  if (static_cast<std::int64_t>(f.size()) != g.total_points())
    throw GridMismatch("quadratic_form_edges: field size mismatch");
  const double inv_h2 =
      static_cast<double>(g.points_per_unit()) * g.points_per_unit();
  const std::int64_t total = g.total_points();
  double edges = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    // stride between neighbours along this axis
    std::int64_t stride = 1;
    for (int a = g.dim() - 1; a > axis; --a) stride *= g.axis_points();
    const std::int64_t span_len = stride * g.axis_points();
    for (std::int64_t i = 0; i < total; ++i) {
      const std::int64_t block = (i / span_len) * span_len;
      const std::int64_t j = block + (i - block + stride) % span_len;
      const double d = f[i] - f[j];
      edges += d * d;
    }
  }
  double vf = 0.0;
  for (std::int64_t i = 0; i < total; ++i)
    vf += potential_.values[static_cast<std::size_t>(i)] * f[i] * f[i];
  return g.cell_volume() * (inv_h2 * edges + vf);
}

std::vector<double> DiscreteOperator::assemble_dense(
    std::int64_t dense_dof_limit) const {
  const TorusGrid& g = grid();
  const std::int64_t N = g.total_points();
  if (N > dense_dof_limit)
    throw TooLargeForDense("grid has " + std::to_string(N) +
                           " points, dense limit is " +
                           std::to_string(dense_dof_limit));
  const double inv_h2 =
      static_cast<double>(g.points_per_unit()) * g.points_per_unit();
  std::vector<double> A(static_cast<std::size_t>(N) * N, 0.0);
  for (std::int64_t i = 0; i < N; ++i) {
    A[static_cast<std::size_t>(i) * N + i] =
        2.0 * g.dim() * inv_h2 + potential_.values[static_cast<std::size_t>(i)];
    for (int axis = 0; axis < g.dim(); ++axis) {
      for (int step : {-1, 1}) {
        const std::int64_t j = g.neighbor(i, axis, step);
        A[static_cast<std::size_t>(i) * N + j] -= inv_h2;
      }
    }
  }
  return A;
}

Spectrum DiscreteOperator::eigen_dense(std::int64_t dense_dof_limit) const {
  std::vector<double> A = assemble_dense(dense_dof_limit);
  const auto N = static_cast<lapack_int>(grid().total_points());
  std::vector<double> w(static_cast<std::size_t>(N));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'L', N,
                                         A.data(), N, w.data());
  if (info != 0)
    throw NotConverged("dsyevd failed with info = " + std::to_string(info));
  return Spectrum{std::move(w), "lapack_dsyevd", grid().total_points()};
}

void DiscreteOperator::write_coordinate_matrix(std::ostream& out) const {
  const TorusGrid& g = grid();
  const std::int64_t N = g.total_points();
  const double inv_h2 =
      static_cast<double>(g.points_per_unit()) * g.points_per_unit();
  char buf[64];
  for (std::int64_t i = 0; i < N; ++i) {
    const double diag =
        2.0 * g.dim() * inv_h2 + potential_.values[static_cast<std::size_t>(i)];
    std::snprintf(buf, sizeof buf, "%.17g", diag);
    out << i << ' ' << i << ' ' << buf << '\n';
    // accumulate wrap duplicates (N_axis == 2 folds both neighbours onto one)
    std::int64_t prev_j = -1;
    double acc = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
      for (int step : {-1, 1}) {
        const std::int64_t j = g.neighbor(i, axis, step);
        if (j == i) continue;
        if (j == prev_j) {
          acc -= inv_h2;
          continue;
        }
        if (prev_j >= 0) {
          std::snprintf(buf, sizeof buf, "%.17g", acc);
          out << i << ' ' << prev_j << ' ' << buf << '\n';
        }
        prev_j = j;
        acc = -inv_h2;
      }
    }
    if (prev_j >= 0) {
      std::snprintf(buf, sizeof buf, "%.17g", acc);
      out << i << ' ' << prev_j << ' ' << buf << '\n';
    }
  }
}

std::int64_t count_eigenvalues_below(const Spectrum& spectrum, double mu) {
  return spectrum.count_below(mu);
}

std::int64_t count_eigenvalues_below(const DiscreteOperator& op, double mu,
                                     std::int64_t dense_dof_limit) {
  return op.eigen_dense(dense_dof_limit).count_below(mu);
}

}  // namespace llab
