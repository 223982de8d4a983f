#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace llab {

// Uniform periodic grid on the torus [0, R0)^d with spacing h = 1/n.
// Linear indices are row-major with axis 0 slowest and axis d-1 contiguous.
class TorusGrid {
 public:
  TorusGrid(int dim, int side_length_R0, int points_per_unit_n);

  int dim() const { return dim_; }
  int side_length() const { return R0_; }
  int points_per_unit() const { return n_; }
  double spacing() const { return 1.0 / n_; }
  std::int64_t axis_points() const { return axis_points_; }
  std::int64_t total_points() const { return total_points_; }
  double volume() const;       // R0^d
  double cell_volume() const;  // h^d

  std::int64_t index_of(std::span<const std::int64_t> coords) const;
  std::array<std::int64_t, 3> coords_of(std::int64_t index) const;
  std::int64_t wrap(std::int64_t coord) const;
  std::int64_t neighbor(std::int64_t index, int axis, int step) const;

  bool operator==(const TorusGrid& other) const = default;

 private:
  int dim_;
  int R0_;
  int n_;
  std::int64_t axis_points_;
  std::int64_t total_points_;
};

TorusGrid build_grid(int dim, int side_length_R0, int points_per_unit_n);

enum class Reduction { min, max, sum };

// Disjoint cover of the grid by m^d cubes of nominal side kappa*mu^{-1/2},
// where m = floor(R0*sqrt(mu)) and kappa = R0*sqrt(mu)/m lies in [1,2).
// Per-axis blocks are contiguous index ranges whose lengths differ by at
// most one point; larger blocks sit at lower indices. An optional lattice
// offset translates every cube with periodic wrap.
class CubePartition {
 public:
  static CubePartition build(const TorusGrid& grid, double mu);

  const TorusGrid& grid() const { return grid_; }
  double mu() const { return mu_; }
  std::int64_t blocks_per_axis() const { return m_; }
  double kappa() const { return kappa_; }
  double nominal_side() const { return static_cast<double>(grid_.side_length()) / m_; }
  std::int64_t cube_count() const;  // m^d
  const std::array<std::int64_t, 3>& offset() const { return offset_; }

  std::int64_t block_start(std::int64_t b) const;
  std::int64_t block_size(std::int64_t b) const;

  CubePartition translated(std::span<const std::int64_t> lattice_offset) const;

  // Calls fn(linear_index) for every grid point of the cube.
  template <typename F>
  void for_each_cell(std::int64_t cube, F&& fn) const {
    const int d = grid_.dim();
    const std::int64_t N = grid_.axis_points();
    std::array<std::int64_t, 3> start{0, 0, 0};
    std::array<std::int64_t, 3> len{1, 1, 1};
    std::int64_t rest = cube;
    for (int a = d - 1; a >= 0; --a) {
      const std::int64_t b = rest % m_;
      rest /= m_;
      start[a] = (block_start(b) + offset_[a]) % N;
      len[a] = block_size(b);
    }
    for (std::int64_t i0 = 0; i0 < len[0]; ++i0) {
      const std::int64_t g0 = (start[0] + i0) % N;
      for (std::int64_t i1 = 0; i1 < len[1]; ++i1) {
        const std::int64_t g1 = (start[1] + i1) % N;
        for (std::int64_t i2 = 0; i2 < len[2]; ++i2) {
          const std::int64_t g2 = (start[2] + i2) % N;
          std::int64_t idx = g0;
          if (d > 1) idx = idx * N + g1;
          if (d > 2) idx = idx * N + g2;
          fn(idx);
        }
      }
    }
  }

  double reduce(std::span<const double> field, std::int64_t cube,
                Reduction reduction) const;

 private:
  CubePartition(const TorusGrid& grid, double mu, std::int64_t m, double kappa)
      : grid_(grid), mu_(mu), m_(m), kappa_(kappa), offset_{0, 0, 0} {}

  TorusGrid grid_;
  double mu_;
  std::int64_t m_;
  double kappa_;
  std::array<std::int64_t, 3> offset_;
};

CubePartition partition(const TorusGrid& grid, double mu);
CubePartition translate_partition(const CubePartition& p,
                                  std::span<const std::int64_t> lattice_offset);
double cube_reduce(std::span<const double> field, const CubePartition& p,
                   std::int64_t cube, Reduction reduction);

}  // namespace llab
