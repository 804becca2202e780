#include "quadsplit/fft.hpp"

#include <fftw3.h>

#include <atomic>
#include <map>
#include <mutex>
#include <tuple>

#include "quadsplit/errors.hpp"

namespace qs {

namespace {

std::atomic<int> g_threads{1};

struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<std::vector<int>, int, int, int>, fftw_plan> plans;
  bool threads_ready = false;

  ~PlanCache() {
    for (auto& [k, p] : plans) fftw_destroy_plan(p);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void set_threads(int t) { g_threads = t < 1 ? 1 : t; }
int threads() { return g_threads; }

void fft_along(std::complex<double>* data, const std::vector<int>& sizes, int dim, int sign) {
  if (dim < 0 || dim >= static_cast<int>(sizes.size())) throw Error(ErrorKind::dimension, "fft_along: bad dim");
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  const int nt = g_threads;
  fftw_plan plan;
  {
    PlanCache& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto key = std::make_tuple(sizes, dim, sign, nt);
    auto it = c.plans.find(key);
    if (it == c.plans.end()) {
      if (!c.threads_ready) {
        fftw_init_threads();
        c.threads_ready = true;
      }
      fftw_plan_with_nthreads(nt);
      int stride = 1;
      for (std::size_t e = dim + 1; e < sizes.size(); ++e) stride *= sizes[e];
      int before = 1;
      for (int e = 0; e < dim; ++e) before *= sizes[e];
      fftw_iodim d{sizes[dim], stride, stride};
      fftw_iodim how[2] = {{before, sizes[dim] * stride, sizes[dim] * stride}, {stride, 1, 1}};
      plan = fftw_plan_guru_dft(1, &d, 2, how, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
      if (plan == nullptr) throw Error(ErrorKind::invalid_argument, "fft_along: FFTW planning failed");
      c.plans.emplace(key, plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace qs
