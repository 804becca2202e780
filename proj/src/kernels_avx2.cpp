// Built with -mavx2 only (no FMA) so products round exactly like the scalar kernels.
#include <immintrin.h>

#include <cstddef>

#include "quadsplit/kernels.hpp"

namespace qs::kernels {

namespace {

// [a, b] * [c, d] for two complex lanes: (ac - bd, ad + bc).
inline __m256d mul2(__m256d x, __m256d y) {
  const __m256d yre = _mm256_movedup_pd(y);
  const __m256d yim = _mm256_unpackhi_pd(y, y);
  const __m256d xsw = _mm256_permute_pd(x, 0x5);
  return _mm256_addsub_pd(_mm256_mul_pd(x, yre), _mm256_mul_pd(xsw, yim));
}

void cmul_avx2(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(dst + 2 * i);
    const __m256d y = _mm256_loadu_pd(src + 2 * i);
    _mm256_storeu_pd(dst + 2 * i, mul2(x, y));
  }
  for (; i < n; ++i) {
    const double a = dst[2 * i], b = dst[2 * i + 1];
    const double c = src[2 * i], d = src[2 * i + 1];
    dst[2 * i] = a * c - b * d;
    dst[2 * i + 1] = a * d + b * c;
  }
}

void cscale_avx2(double* dst, double re, double im, std::size_t n) {
  const __m256d y = _mm256_setr_pd(re, im, re, im);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x = _mm256_loadu_pd(dst + 2 * i);
    _mm256_storeu_pd(dst + 2 * i, mul2(x, y));
  }
  for (; i < n; ++i) {
    const double a = dst[2 * i], b = dst[2 * i + 1];
    dst[2 * i] = a * re - b * im;
    dst[2 * i + 1] = a * im + b * re;
  }
}

double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

double sqnorm_avx2(const double* a, std::size_t n) {
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(a + i);
    const __m256d x1 = _mm256_loadu_pd(a + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(x0, x0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(x1, x1));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) s += a[i] * a[i];
  return s;
}

double sqdiff_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

const KernelTable kAvx2{"avx2", cmul_avx2, cscale_avx2, sqnorm_avx2, sqdiff_avx2};

}  // namespace

const KernelTable* avx2_table_impl() { return &kAvx2; }

}  // namespace qs::kernels
