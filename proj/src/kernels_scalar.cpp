#include <algorithm>
#include <cmath>

#include "llab/kernels.hpp"

namespace llab::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc = std::fma(x[i], y[i], acc);
  return acc;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double min_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::min(m, x[i]);
  return m;
}

double max_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void xpay_scalar(const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(b, y[i], x[i]);
}

void mul_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void reciprocal_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / x[i];
}

double halfpow_sum_scalar(const double* x, double mu, int dim, std::size_t n) {
  double acc = 0.0;
  switch (dim) {
    case 1:
      for (std::size_t i = 0; i < n; ++i)
        acc += std::sqrt(std::max(mu - x[i], 0.0));
      break;
    case 2:
      for (std::size_t i = 0; i < n; ++i) acc += std::max(mu - x[i], 0.0);
      break;
    default:
      for (std::size_t i = 0; i < n; ++i) {
        const double t = std::max(mu - x[i], 0.0);
        acc += t * std::sqrt(t);
      }
      break;
  }
  return acc;
}

// The per-element expression trees below are mirrored exactly by the AVX2
// lane; keep them in sync when editing.

void stencil_1d_scalar(const double* f, const double* V, double inv_h2,
                       std::int64_t n, double* out) {
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t im = i == 0 ? n - 1 : i - 1;
    const std::int64_t ip = i == n - 1 ? 0 : i + 1;
    const double lap = ((f[i] + f[i]) - f[im]) - f[ip];
    out[i] = std::fma(V[i], f[i], inv_h2 * lap);
  }
}

void stencil_2d_scalar(const double* f, const double* V, double inv_h2,
                       std::int64_t n, double* out) {
  for (std::int64_t r = 0; r < n; ++r) {
    const double* up = f + (r == 0 ? n - 1 : r - 1) * n;
    const double* dn = f + (r == n - 1 ? 0 : r + 1) * n;
    const double* fr = f + r * n;
    const double* vr = V + r * n;
    double* outr = out + r * n;
    for (std::int64_t c = 0; c < n; ++c) {
      const std::int64_t cm = c == 0 ? n - 1 : c - 1;
      const std::int64_t cp = c == n - 1 ? 0 : c + 1;
      const double t2 = fr[c] + fr[c];
      const double lap = ((((t2 + t2) - up[c]) - dn[c]) - fr[cm]) - fr[cp];
      outr[c] = std::fma(vr[c], fr[c], inv_h2 * lap);
    }
  }
}

void stencil_3d_scalar(const double* f, const double* V, double inv_h2,
                       std::int64_t n, double* out) {
  const std::int64_t plane = n * n;
  for (std::int64_t s = 0; s < n; ++s) {
    const double* sm = f + (s == 0 ? n - 1 : s - 1) * plane;
    const double* sp = f + (s == n - 1 ? 0 : s + 1) * plane;
    for (std::int64_t r = 0; r < n; ++r) {
      const std::int64_t base = s * plane + r * n;
      const double* up = f + s * plane + (r == 0 ? n - 1 : r - 1) * n;
      const double* dn = f + s * plane + (r == n - 1 ? 0 : r + 1) * n;
      const double* fr = f + base;
      const double* vr = V + base;
      const double* smr = sm + r * n;
      const double* spr = sp + r * n;
      double* outr = out + base;
      for (std::int64_t c = 0; c < n; ++c) {
        const std::int64_t cm = c == 0 ? n - 1 : c - 1;
        const std::int64_t cp = c == n - 1 ? 0 : c + 1;
        const double t2 = fr[c] + fr[c];
        const double six = (t2 + t2) + t2;
        const double lap =
            ((((((six - smr[c]) - spr[c]) - up[c]) - dn[c]) - fr[cm]) - fr[cp]);
        outr[c] = std::fma(vr[c], fr[c], inv_h2 * lap);
      }
    }
  }
}

}  // namespace

const Kernels& scalar() {
  static const Kernels table = {
      "scalar",           dot_scalar,        sum_scalar,
      min_scalar,         max_scalar,        axpy_scalar,
      xpay_scalar,        mul_scalar,        reciprocal_scalar,
      halfpow_sum_scalar, stencil_1d_scalar, stencil_2d_scalar,
      stencil_3d_scalar,
  };
  return table;
}

}  // namespace llab::kernels
