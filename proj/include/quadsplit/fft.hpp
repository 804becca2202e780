#pragma once

#include <complex>
#include <vector>

namespace qs {

// In-place unnormalized 1-D transforms along `dim` of a row-major array with the given sizes.
// sign = -1 forward, +1 backward. Plans are cached per (sizes, dim, sign, threads).
void fft_along(std::complex<double>* data, const std::vector<int>& sizes, int dim, int sign);

// Thread count for FFTW plans created afterwards and for pointwise loops.
void set_threads(int threads);
int threads();

}  // namespace qs
