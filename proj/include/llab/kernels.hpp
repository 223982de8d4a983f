#pragma once

#include <cstddef>
#include <cstdint>

namespace llab::kernels {

// Vector primitives and the periodic (2d+1)-point stencil that sit in the
// inner loops of the CG solver and the counting curves. Scalar reference
// implementations always exist; wider lanes are selected once at runtime.
// LLAB_SIMD=scalar|avx2 overrides the selection.
//
// Pointwise kernels (axpy, xpay, mul, reciprocal, stencil_*) use the same
// per-element operation tree in every lane, so their outputs are bit-identical
// across lanes. Reductions (dot, sum, min, max, halfpow_sum) differ only in
// accumulation order.
struct Kernels {
  const char* name;

  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*min)(const double* x, std::size_t n);
  double (*max)(const double* x, std::size_t n);

  void (*axpy)(double a, const double* x, double* y, std::size_t n);  // y += a*x
  void (*xpay)(const double* x, double b, double* y, std::size_t n);  // y = x + b*y
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);
  void (*reciprocal)(const double* x, double* out, std::size_t n);

  // sum over i of (mu - x_i)_+^{dim/2}; the phase-space volume Riemann sum
  double (*halfpow_sum)(const double* x, double mu, int dim, std::size_t n);

  // (L f)_i = inv_h2 * (2*dim*f_i - sum of axis neighbours) + V_i * f_i on a
  // periodic grid with n points per axis (total n, n^2, n^3 points).
  void (*stencil_1d)(const double* f, const double* V, double inv_h2,
                     std::int64_t n, double* out);
  void (*stencil_2d)(const double* f, const double* V, double inv_h2,
                     std::int64_t n, double* out);
  void (*stencil_3d)(const double* f, const double* V, double inv_h2,
                     std::int64_t n, double* out);
};

const Kernels& scalar();

// nullptr when the build or the CPU lacks AVX2+FMA.
const Kernels* avx2();

const Kernels& active();

}  // namespace llab::kernels
