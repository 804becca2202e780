#pragma once

#include <cstddef>

// Pointwise kernels on interleaved complex arrays (re, im, re, im, ...); `n` counts complex values.
namespace qs::kernels {

struct KernelTable {
  const char* name;
  void (*cmul)(double* dst, const double* src, std::size_t n);  // dst[i] *= src[i]
  void (*cscale)(double* dst, double re, double im, std::size_t n);
  double (*sqnorm)(const double* a, std::size_t n);  // sum |a_i|^2
  double (*sqdiff)(const double* a, const double* b, std::size_t n);  // sum |a_i - b_i|^2
};

const KernelTable& scalar_table();
// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();
bool cpu_has_avx2();

// Selected once: AVX2 if compiled and supported, unless QS_FORCE_SCALAR is set.
const KernelTable& active();

}  // namespace qs::kernels
