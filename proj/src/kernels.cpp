#include "quadsplit/kernels.hpp"

#include <cstdlib>

namespace qs::kernels {

#ifdef QS_HAVE_AVX2_TU
const KernelTable* avx2_table_impl();
#endif

namespace {

void cmul_scalar(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = dst[2 * i], b = dst[2 * i + 1];
    const double c = src[2 * i], d = src[2 * i + 1];
    dst[2 * i] = a * c - b * d;
    dst[2 * i + 1] = a * d + b * c;
  }
}

void cscale_scalar(double* dst, double re, double im, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = dst[2 * i], b = dst[2 * i + 1];
    dst[2 * i] = a * re - b * im;
    dst[2 * i + 1] = a * im + b * re;
  }
}

double sqnorm_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) s += a[i] * a[i];
  return s;
}

double sqdiff_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

const KernelTable kScalar{"scalar", cmul_scalar, cscale_scalar, sqnorm_scalar, sqdiff_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#ifdef QS_HAVE_AVX2_TU
  return avx2_table_impl();
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* force = std::getenv("QS_FORCE_SCALAR");
    const bool want_scalar = force != nullptr && force[0] != '\0' && force[0] != '0';
    const KernelTable* v = avx2_table();
    return (!want_scalar && v != nullptr && cpu_has_avx2()) ? v : &kScalar;
  }();
  return *chosen;
}

}  // namespace qs::kernels
