#include "llab/torus_grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "llab/errors.hpp"

namespace llab {

TorusGrid::TorusGrid(int dim, int side_length_R0, int points_per_unit_n)
    : dim_(dim), R0_(side_length_R0), n_(points_per_unit_n) {
  if (dim < 1 || dim > 3)
    throw InvalidDimension("dim must be 1, 2 or 3, got " + std::to_string(dim));
  if (side_length_R0 < 1)
    throw InvalidResolution("side length R0 must be a positive integer, got " +
                            std::to_string(side_length_R0));
  if (points_per_unit_n < 2)
    throw InvalidResolution("points per unit n must be >= 2, got " +
                            std::to_string(points_per_unit_n));
  axis_points_ = static_cast<std::int64_t>(R0_) * n_;
  total_points_ = 1;
  for (int a = 0; a < dim_; ++a) {
    if (total_points_ > std::numeric_limits<std::int64_t>::max() / axis_points_)
      throw InvalidResolution("grid too large");
    total_points_ *= axis_points_;
  }
}

double TorusGrid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= R0_;
  return v;
}

double TorusGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing();
  return v;
}

std::int64_t TorusGrid::wrap(std::int64_t coord) const {
  const std::int64_t N = axis_points_;
  std::int64_t c = coord % N;
  return c < 0 ? c + N : c;
}

std::int64_t TorusGrid::index_of(std::span<const std::int64_t> coords) const {
  if (static_cast<int>(coords.size()) != dim_)
    throw GridMismatch("coordinate arity does not match grid dimension");
  std::int64_t idx = 0;
  for (int a = 0; a < dim_; ++a) idx = idx * axis_points_ + wrap(coords[a]);
  return idx;
}

std::array<std::int64_t, 3> TorusGrid::coords_of(std::int64_t index) const {
  std::array<std::int64_t, 3> c{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    c[a] = index % axis_points_;
    index /= axis_points_;
  }
  return c;
}

std::int64_t TorusGrid::neighbor(std::int64_t index, int axis, int step) const {
  auto c = coords_of(index);
  c[axis] = wrap(c[axis] + step);
  return index_of(std::span<const std::int64_t>(c.data(), dim_));
}

TorusGrid build_grid(int dim, int side_length_R0, int points_per_unit_n) {
  return TorusGrid(dim, side_length_R0, points_per_unit_n);
}

CubePartition CubePartition::build(const TorusGrid& grid, double mu) {
  if (!(mu > 0.0)) throw InvalidParameters("partition requires mu > 0");
  const double scale = grid.side_length() * std::sqrt(mu);
  const auto m = static_cast<std::int64_t>(std::floor(scale));
  if (m < 1)
    throw ScaleExceedsDomain("counting cube exceeds the domain: R0*sqrt(mu) = " +
                             std::to_string(scale) + " < 1");
  if (m > grid.axis_points())
    throw CubeUnresolvable("counting cube smaller than one grid cell: m = " +
                           std::to_string(m) + " > " +
                           std::to_string(grid.axis_points()) + " points");
  return CubePartition(grid, mu, m, scale / static_cast<double>(m));
}

std::int64_t CubePartition::cube_count() const {
  std::int64_t c = 1;
  for (int a = 0; a < grid_.dim(); ++a) c *= m_;
  return c;
}

std::int64_t CubePartition::block_start(std::int64_t b) const {
  const std::int64_t N = grid_.axis_points();
  const std::int64_t q = N / m_;
  const std::int64_t r = N % m_;
  return b * q + std::min(b, r);
}

std::int64_t CubePartition::block_size(std::int64_t b) const {
  const std::int64_t N = grid_.axis_points();
  return N / m_ + (b < N % m_ ? 1 : 0);
}

CubePartition CubePartition::translated(
    std::span<const std::int64_t> lattice_offset) const {
  if (static_cast<int>(lattice_offset.size()) != grid_.dim())
    throw GridMismatch("offset arity does not match grid dimension");
  CubePartition out = *this;
  const std::int64_t N = grid_.axis_points();
  for (int a = 0; a < grid_.dim(); ++a) {
    std::int64_t o = (offset_[a] + lattice_offset[a]) % N;
    out.offset_[a] = o < 0 ? o + N : o;
  }
  return out;
}

double CubePartition::reduce(std::span<const double> field, std::int64_t cube,
                             Reduction reduction) const {
  if (static_cast<std::int64_t>(field.size()) != grid_.total_points())
    throw GridMismatch("field size does not match partition grid");
  if (cube < 0 || cube >= cube_count())
    throw InvalidParameters("cube index out of range");
  double acc;
  switch (reduction) {
    case Reduction::min:
      acc = std::numeric_limits<double>::infinity();
      for_each_cell(cube, [&](std::int64_t i) { acc = std::min(acc, field[i]); });
      return acc;
    case Reduction::max:
      acc = -std::numeric_limits<double>::infinity();
      for_each_cell(cube, [&](std::int64_t i) { acc = std::max(acc, field[i]); });
      return acc;
    default:
      acc = 0.0;
      for_each_cell(cube, [&](std::int64_t i) { acc += field[i]; });
      return acc * grid_.cell_volume();
  }
}

CubePartition partition(const TorusGrid& grid, double mu) {
  return CubePartition::build(grid, mu);
}

CubePartition translate_partition(const CubePartition& p,
                                  std::span<const std::int64_t> lattice_offset) {
  return p.translated(lattice_offset);
}

double cube_reduce(std::span<const double> field, const CubePartition& p,
                   std::int64_t cube, Reduction reduction) {
  return p.reduce(field, cube, reduction);
}

}  // namespace llab
