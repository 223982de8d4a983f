#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "llab/discrete_operator.hpp"
#include "llab/torus_grid.hpp"

namespace llab {

struct SolveOptions {
  double tolerance = 1e-10;          // relative residual ||Lu - 1|| / ||1||
  std::int64_t max_iterations = 0;   // 0: max(10000, 10 * total_points)
  bool jacobi_preconditioner = true;
};

struct LandscapeField {
  TorusGrid grid;
  std::vector<double> u;  // positive everywhere
  double residual_norm = 0.0;
  std::int64_t iterations = 0;
  std::string provenance = "{}";
};

// Conjugate-gradient solution of L u = 1. V must be nonnegative and not
// identically zero (constants are in the kernel of -Delta on the torus).
LandscapeField solve_landscape(const DiscreteOperator& op,
                               const SolveOptions& options = {});

// W = 1/u pointwise.
std::vector<double> effective_potential(const LandscapeField& landscape);

struct MinimaList {
  std::vector<double> values;                 // nondecreasing
  std::vector<std::int64_t> representatives;  // lowest linear index per plateau
};

// A grid point is a local minimum if no 2d-neighbour is strictly smaller;
// an equal-value connected plateau with no strictly smaller neighbour counts
// once, represented by its lowest linear index.
MinimaList local_minima(std::span<const double> W, const TorusGrid& grid);

// Relative defect of the discrete ground-state transform
//   <Lf,f> = h^{d-2} sum_edges u_i u_j (g_i - g_j)^2 + h^d sum_i f_i^2 / u_i
// with g = f/u; exact (up to roundoff) whenever L u = 1 exactly.
double ground_state_identity_residual(const DiscreteOperator& op,
                                      const LandscapeField& landscape,
                                      std::span<const double> f);

}  // namespace llab
