// AVX2+FMA lane. Each pointwise kernel mirrors the scalar expression tree
// element-for-element (same fma placement, same subtraction order), so the
// two lanes agree bitwise on pointwise output; reductions differ only in
// accumulation order.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "llab/kernels.hpp"

namespace llab::kernels {
namespace {

inline double hadd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double tail = 0.0;
  for (; i < n; ++i) tail = std::fma(x[i], y[i], tail);
  return hadd(acc) + tail;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  return hadd(acc) + tail;
}

double min_avx2(const double* x, std::size_t n) {
  double m = x[0];
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4)
      acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    m = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
  }
  for (; i < n; ++i) m = std::min(m, x[i]);
  return m;
}

double max_avx2(const double* x, std::size_t n) {
  double m = x[0];
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4)
      acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  }
  for (; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i,
        _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void xpay_avx2(const double* x, double b, double* y, std::size_t n) {
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i,
        _mm256_fmadd_pd(bv, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::fma(b, y[i], x[i]);
}

void mul_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void reciprocal_avx2(const double* x, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = 1.0 / x[i];
}

double halfpow_sum_avx2(const double* x, double mu, int dim, std::size_t n) {
  const __m256d muv = _mm256_set1_pd(mu);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  switch (dim) {
    case 1:
      for (; i + 4 <= n; i += 4) {
        const __m256d t =
            _mm256_max_pd(_mm256_sub_pd(muv, _mm256_loadu_pd(x + i)), zero);
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(t));
      }
      break;
    case 2:
      for (; i + 4 <= n; i += 4) {
        const __m256d t =
            _mm256_max_pd(_mm256_sub_pd(muv, _mm256_loadu_pd(x + i)), zero);
        acc = _mm256_add_pd(acc, t);
      }
      break;
    default:
      for (; i + 4 <= n; i += 4) {
        const __m256d t =
            _mm256_max_pd(_mm256_sub_pd(muv, _mm256_loadu_pd(x + i)), zero);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(t, _mm256_sqrt_pd(t)));
      }
      break;
  }
  double tail = 0.0;
  switch (dim) {
    case 1:
      for (; i < n; ++i) tail += std::sqrt(std::max(mu - x[i], 0.0));
      break;
    case 2:
      for (; i < n; ++i) tail += std::max(mu - x[i], 0.0);
      break;
    default:
      for (; i < n; ++i) {
        const double t = std::max(mu - x[i], 0.0);
        tail += t * std::sqrt(t);
      }
      break;
  }
  return hadd(acc) + tail;
}

inline double stencil_point_1d(const double* f, const double* V, double inv_h2,
                               std::int64_t n, std::int64_t i) {
  const std::int64_t im = i == 0 ? n - 1 : i - 1;
  const std::int64_t ip = i == n - 1 ? 0 : i + 1;
  const double lap = ((f[i] + f[i]) - f[im]) - f[ip];
  return std::fma(V[i], f[i], inv_h2 * lap);
}

void stencil_1d_avx2(const double* f, const double* V, double inv_h2,
                     std::int64_t n, double* out) {
  if (n < 6) {
    for (std::int64_t i = 0; i < n; ++i)
      out[i] = stencil_point_1d(f, V, inv_h2, n, i);
    return;
  }
  out[0] = stencil_point_1d(f, V, inv_h2, n, 0);
  const __m256d hv = _mm256_set1_pd(inv_h2);
  std::int64_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d fc = _mm256_loadu_pd(f + i);
    const __m256d fm = _mm256_loadu_pd(f + i - 1);
    const __m256d fp = _mm256_loadu_pd(f + i + 1);
    const __m256d lap = _mm256_sub_pd(_mm256_sub_pd(_mm256_add_pd(fc, fc), fm), fp);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(_mm256_loadu_pd(V + i), fc,
                                              _mm256_mul_pd(hv, lap)));
  }
  for (; i < n; ++i) out[i] = stencil_point_1d(f, V, inv_h2, n, i);
}

void stencil_2d_avx2(const double* f, const double* V, double inv_h2,
                     std::int64_t n, double* out) {
  const __m256d hv = _mm256_set1_pd(inv_h2);
  for (std::int64_t r = 0; r < n; ++r) {
    const double* up = f + (r == 0 ? n - 1 : r - 1) * n;
    const double* dn = f + (r == n - 1 ? 0 : r + 1) * n;
    const double* fr = f + r * n;
    const double* vr = V + r * n;
    double* outr = out + r * n;
    auto edge = [&](std::int64_t c) {
      const std::int64_t cm = c == 0 ? n - 1 : c - 1;
      const std::int64_t cp = c == n - 1 ? 0 : c + 1;
      const double t2 = fr[c] + fr[c];
      const double lap = ((((t2 + t2) - up[c]) - dn[c]) - fr[cm]) - fr[cp];
      outr[c] = std::fma(vr[c], fr[c], inv_h2 * lap);
    };
    if (n < 6) {
      for (std::int64_t c = 0; c < n; ++c) edge(c);
      continue;
    }
    edge(0);
    std::int64_t c = 1;
    for (; c + 4 <= n - 1; c += 4) {
      const __m256d fc = _mm256_loadu_pd(fr + c);
      const __m256d t2 = _mm256_add_pd(fc, fc);
      const __m256d lap = _mm256_sub_pd(
          _mm256_sub_pd(
              _mm256_sub_pd(_mm256_sub_pd(_mm256_add_pd(t2, t2),
                                          _mm256_loadu_pd(up + c)),
                            _mm256_loadu_pd(dn + c)),
              _mm256_loadu_pd(fr + c - 1)),
          _mm256_loadu_pd(fr + c + 1));
      _mm256_storeu_pd(outr + c, _mm256_fmadd_pd(_mm256_loadu_pd(vr + c), fc,
                                                 _mm256_mul_pd(hv, lap)));
    }
    for (; c < n; ++c) edge(c);
  }
}

void stencil_3d_avx2(const double* f, const double* V, double inv_h2,
                     std::int64_t n, double* out) {
  const __m256d hv = _mm256_set1_pd(inv_h2);
  const std::int64_t plane = n * n;
  for (std::int64_t s = 0; s < n; ++s) {
    const double* smp = f + (s == 0 ? n - 1 : s - 1) * plane;
    const double* spp = f + (s == n - 1 ? 0 : s + 1) * plane;
    for (std::int64_t r = 0; r < n; ++r) {
      const std::int64_t base = s * plane + r * n;
      const double* up = f + s * plane + (r == 0 ? n - 1 : r - 1) * n;
      const double* dn = f + s * plane + (r == n - 1 ? 0 : r + 1) * n;
      const double* fr = f + base;
      const double* vr = V + base;
      const double* smr = smp + r * n;
      const double* spr = spp + r * n;
      double* outr = out + base;
      auto edge = [&](std::int64_t c) {
        const std::int64_t cm = c == 0 ? n - 1 : c - 1;
        const std::int64_t cp = c == n - 1 ? 0 : c + 1;
        const double t2 = fr[c] + fr[c];
        const double six = (t2 + t2) + t2;
        const double lap =
            ((((((six - smr[c]) - spr[c]) - up[c]) - dn[c]) - fr[cm]) -
             fr[cp]);
        outr[c] = std::fma(vr[c], fr[c], inv_h2 * lap);
      };
      if (n < 6) {
        for (std::int64_t c = 0; c < n; ++c) edge(c);
        continue;
      }
      edge(0);
      std::int64_t c = 1;
      for (; c + 4 <= n - 1; c += 4) {
        const __m256d fc = _mm256_loadu_pd(fr + c);
        const __m256d t2 = _mm256_add_pd(fc, fc);
        const __m256d six = _mm256_add_pd(_mm256_add_pd(t2, t2), t2);
        __m256d lap = _mm256_sub_pd(six, _mm256_loadu_pd(smr + c));
        lap = _mm256_sub_pd(lap, _mm256_loadu_pd(spr + c));
        lap = _mm256_sub_pd(lap, _mm256_loadu_pd(up + c));
        lap = _mm256_sub_pd(lap, _mm256_loadu_pd(dn + c));
        lap = _mm256_sub_pd(lap, _mm256_loadu_pd(fr + c - 1));
        lap = _mm256_sub_pd(lap, _mm256_loadu_pd(fr + c + 1));
        _mm256_storeu_pd(outr + c, _mm256_fmadd_pd(_mm256_loadu_pd(vr + c), fc,
                                                   _mm256_mul_pd(hv, lap)));
      }
      for (; c < n; ++c) edge(c);
    }
  }
}

}  // namespace

const Kernels* avx2_table() {
#if defined(__GNUC__)
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
    return nullptr;
#endif
  static const Kernels table = {
      "avx2",           dot_avx2,        sum_avx2,        min_avx2,
      max_avx2,         axpy_avx2,       xpay_avx2,       mul_avx2,
      reciprocal_avx2,  halfpow_sum_avx2, stencil_1d_avx2, stencil_2d_avx2,
      stencil_3d_avx2,
  };
  return &table;
}

}  // namespace llab::kernels
