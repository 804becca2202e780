#include "quadsplit/spectral.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "quadsplit/errors.hpp"
#include "quadsplit/fft.hpp"
#include "quadsplit/kernels.hpp"

namespace qs {

using cplx = std::complex<double>;

Grid::Grid(std::vector<int> s, std::vector<double> l, std::vector<double> h)
    : sizes(std::move(s)), lo(std::move(l)), hi(std::move(h)) {
  validate();
}

Grid Grid::uniform(int n, int size, double l, double h) {
  return Grid(std::vector<int>(n, size), std::vector<double>(n, l), std::vector<double>(n, h));
}

void Grid::validate() const {
  if (sizes.empty()) throw Error(ErrorKind::dimension, "grid: at least one dim required");
  if (lo.size() != sizes.size() || hi.size() != sizes.size())
    throw Error(ErrorKind::dimension, "grid: sizes and bounds disagree");
  for (std::size_t d = 0; d < sizes.size(); ++d) {
    if (sizes[d] < 4) throw Error(ErrorKind::invalid_argument, "grid: sizes must be >= 4");
    if (!std::isfinite(lo[d]) || !std::isfinite(hi[d]) || !(hi[d] > lo[d]))
      throw Error(ErrorKind::invalid_argument, "grid: bounds must be finite with hi > lo");
  }
}

std::size_t Grid::total() const {
  std::size_t t = 1;
  for (int s : sizes) t *= static_cast<std::size_t>(s);
  return t;
}

double Grid::xi(int d, int i) const {
  const int n = sizes[d];
  const int k = 2 * i < n ? i : i - n;
  return 2.0 * std::numbers::pi / length(d) * k;
}

std::size_t Grid::stride(int d) const {
  std::size_t s = 1;
  for (int e = d + 1; e < dim(); ++e) s *= static_cast<std::size_t>(sizes[e]);
  return s;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dim(); ++d) v *= spacing(d);
  return v;
}

double Grid::max_abs_x(int d) const { return std::max(std::abs(lo[d]), std::abs(x(d, sizes[d] - 1))); }

StateField::StateField(Grid g)
    : grid(std::move(g)), values(grid.total(), cplx(0.0, 0.0)), space(grid.dim(), Space::physical) {}

StateField StateField::from_function(const Grid& g, const std::function<cplx(const std::vector<double>&)>& f) {
  StateField s(g);
  std::vector<int> idx(g.dim(), 0);
  std::vector<double> x(g.dim());
  for (std::size_t p = 0; p < s.values.size(); ++p) {
    for (int d = 0; d < g.dim(); ++d) x[d] = g.x(d, idx[d]);
    s.values[p] = f(x);
    for (int d = g.dim() - 1; d >= 0; --d) {
      if (++idx[d] < g.sizes[d]) break;
      idx[d] = 0;
    }
  }
  return s;
}

bool StateField::all_physical() const {
  for (Space s : space)
    if (s != Space::physical) return false;
  return true;
}

ExecutionStats& ExecutionStats::operator+=(const ExecutionStats& o) {
  fft_passes += o.fft_passes;
  fft_1d_calls += o.fft_1d_calls;
  pointwise_mults += o.pointwise_mults;
  wall_seconds += o.wall_seconds;
  return *this;
}

namespace {

double* raw(StateField& f) { return reinterpret_cast<double*>(f.values.data()); }
const double* raw(const StateField& f) { return reinterpret_cast<const double*>(f.values.data()); }

// Calls fn(begin, end, idx) on contiguous chunks; idx is the multi-index of `begin`.
template <class Fn>
void parallel_points(const Grid& g, Fn&& fn) {
  const std::size_t total = g.total();
  const int nt = (total >= (1u << 15)) ? threads() : 1;
  auto run = [&](std::size_t b, std::size_t e) {
    std::vector<int> idx(g.dim());
    std::size_t rem = b;
    for (int d = g.dim() - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(rem % g.sizes[d]);
      rem /= g.sizes[d];
    }
    fn(b, e, idx);
  };
  if (nt <= 1) {
    run(0, total);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (total + nt - 1) / nt;
  for (int w = 0; w < nt; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(total, b + chunk);
    if (b < e) pool.emplace_back(run, b, e);
  }
}

inline void advance(const Grid& g, std::vector<int>& idx) {
  for (int d = g.dim() - 1; d >= 0; --d) {
    if (++idx[d] < g.sizes[d]) return;
    idx[d] = 0;
  }
}

void transform(StateField& f, int d, Space target, ExecutionStats& st) {
  if (f.space[d] == target) return;
  const Grid& g = f.grid;
  fft_along(f.values.data(), g.sizes, d, target == Space::frequency ? -1 : +1);
  st.fft_passes += 1;
  st.fft_1d_calls += static_cast<long long>(g.total() / g.sizes[d]);
  if (target == Space::physical) {
    kernels::active().cscale(raw(f), 1.0 / g.sizes[d], 0.0, g.total());
    st.pointwise_mults += static_cast<long long>(g.total());
  }
  f.space[d] = target;
}

std::vector<int> support(const RMat& a) {
  std::vector<int> s;
  for (Eigen::Index d = 0; d < a.rows(); ++d)
    if (a.row(d).cwiseAbs().maxCoeff() != 0.0 || a.col(d).cwiseAbs().maxCoeff() != 0.0) s.push_back(static_cast<int>(d));
  return s;
}

// Multiplies the field by m(idx) computed pointwise.
template <class M>
void multiply(StateField& f, M&& m, ExecutionStats& st) {
  const Grid& g = f.grid;
  std::vector<cplx> mult(g.total());
  parallel_points(g, [&](std::size_t b, std::size_t e, std::vector<int>& idx) {
    for (std::size_t p = b; p < e; ++p) {
      mult[p] = m(idx);
      advance(g, idx);
    }
  });
  const auto& k = kernels::active();
  const std::size_t total = g.total();
  const int nt = (total >= (1u << 15)) ? threads() : 1;
  if (nt <= 1) {
    k.cmul(raw(f), reinterpret_cast<const double*>(mult.data()), total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + nt - 1) / nt;
    for (int w = 0; w < nt; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(total, b + chunk);
      if (b < e)
        pool.emplace_back([&, b, e] {
          k.cmul(raw(f) + 2 * b, reinterpret_cast<const double*>(mult.data()) + 2 * b, e - b);
        });
    }
  }
  st.pointwise_mults += static_cast<long long>(total);
}

double quad_form(const RMat& a, const std::vector<int>& sup, const std::vector<double>& v) {
  double s = 0.0;
  for (int r : sup)
    for (int c : sup) s += a(r, c) * v[r] * v[c];
  return s;
}

void apply_lazy(StateField& f, const SplitStep& step, ExecutionStats& st) {
  const Grid& g = f.grid;
  const int n = g.dim();
  step.validate(n);
  switch (step.kind) {
    case StepKind::scalar: {
      if (step.gamma == cplx(0.0, 0.0)) return;
      const cplx e = std::exp(step.gamma);
      kernels::active().cscale(raw(f), e.real(), e.imag(), g.total());
      st.pointwise_mults += static_cast<long long>(g.total());
      return;
    }
    case StepKind::translate: {
      const int j = step.j;
      const double a = step.alpha;
      transform(f, j, Space::frequency, st);
      multiply(f, [&](const std::vector<int>& idx) {
        const double ph = a * g.xi(j, idx[j]);
        return g.is_nyquist(j, idx[j]) ? cplx(std::cos(ph), 0.0) : std::polar(1.0, ph);
      }, st);
      return;
    }
    case StepKind::modulate: {
      const int j = step.j;
      const double a = step.alpha;
      transform(f, j, Space::physical, st);
      multiply(f, [&](const std::vector<int>& idx) { return std::polar(1.0, a * g.x(j, idx[j])); }, st);
      return;
    }
    case StepKind::shear: {
      const int j = step.j, k = step.k;
      const double a = step.alpha;
      if (std::abs(a) * g.max_abs_x(k) > g.length(j) / 2.0)
        throw Error(ErrorKind::aliasing, "shear aliasing guard: |alpha| max|x_k| exceeds half the period; subdivide the step");
      transform(f, j, Space::frequency, st);
      transform(f, k, Space::physical, st);
      multiply(f, [&](const std::vector<int>& idx) {
        const double ph = a * g.x(k, idx[k]) * g.xi(j, idx[j]);
        return g.is_nyquist(j, idx[j]) ? cplx(std::cos(ph), 0.0) : std::polar(1.0, ph);
      }, st);
      return;
    }
    default:
      break;
  }
  const RMat a = 0.5 * (step.a + step.a.transpose());
  const std::vector<int> sup = support(a);
  if (sup.empty()) return;
  const bool fourier = step.kind == StepKind::fourier_quadratic || step.kind == StepKind::gaussian_fourier;
  for (int d : sup) transform(f, d, fourier ? Space::frequency : Space::physical, st);
  const bool gaussian = step.kind == StepKind::gaussian_x || step.kind == StepKind::gaussian_fourier;
  // e^{i x^T a x}, e^{-i a(xi)}, e^{-x^T b x}, e^{-b(xi)}
  const double sign = step.kind == StepKind::x_quadratic ? 1.0 : -1.0;
  multiply(f, [&](const std::vector<int>& idx) {
    thread_local std::vector<double> v;
    v.assign(n, 0.0);
    for (int d : sup) v[d] = fourier ? g.xi(d, idx[d]) : g.x(d, idx[d]);
    const double q = quad_form(a, sup, v);
    return gaussian ? cplx(std::exp(-q), 0.0) : std::polar(1.0, sign * q);
  }, st);
}

}  // namespace

void to_physical(StateField& field, ExecutionStats& stats) {
  for (int d = field.grid.dim() - 1; d >= 0; --d) transform(field, d, Space::physical, stats);
}

void apply_step(StateField& field, const SplitStep& step, ExecutionStats& stats) {
  apply_lazy(field, step, stats);
  to_physical(field, stats);
}

ExecutionStats execute(StateField& field, const SplittingProgram& prog, bool fuse,
                       std::vector<StepDiagnostic>* diagnostics) {
  if (field.grid.dim() != prog.dim) throw Error(ErrorKind::dimension, "execute: grid and program dims differ");
  const auto t0 = std::chrono::steady_clock::now();
  ExecutionStats st;
  for (std::size_t i = 0; i < prog.steps.size(); ++i) {
    const long long before = st.fft_1d_calls;
    if (fuse)
      apply_lazy(field, prog.steps[i], st);
    else
      apply_step(field, prog.steps[i], st);
    if (i + 1 == prog.steps.size()) to_physical(field, st);
    if (diagnostics)
      diagnostics->push_back({static_cast<int>(i), to_string(prog.steps[i].kind), l2_norm(field), st.fft_1d_calls - before});
  }
  to_physical(field, st);
  st.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return st;
}

double l2_norm(const StateField& f) {
  double w = f.grid.cell_volume();
  for (int d = 0; d < f.grid.dim(); ++d)
    if (f.space[d] == Space::frequency) w /= f.grid.sizes[d];
  return std::sqrt(kernels::active().sqnorm(raw(f), f.values.size()) * w);
}

double l2_error(const StateField& a, const StateField& b) {
  if (!(a.grid == b.grid)) throw Error(ErrorKind::dimension, "l2_error: grid mismatch");
  if (!a.all_physical() || !b.all_physical()) throw Error(ErrorKind::invalid_argument, "l2_error: fields must be physical");
  const double w = a.grid.cell_volume();
  const double diff = std::sqrt(kernels::active().sqdiff(raw(a), raw(b), a.values.size()) * w);
  const double ref = l2_norm(b);
  return ref < 1e-300 ? diff : diff / ref;
}

double boundary_mass(const StateField& f) {
  StateField p = f;
  ExecutionStats ignored;
  to_physical(p, ignored);
  const Grid& g = p.grid;
  std::vector<int> shell(g.dim());
  for (int d = 0; d < g.dim(); ++d) shell[d] = static_cast<int>(std::ceil(0.05 * g.sizes[d]));
  double outer = 0.0, all = 0.0;
  std::vector<int> idx(g.dim(), 0);
  for (std::size_t q = 0; q < p.values.size(); ++q) {
    const double m = std::norm(p.values[q]);
    all += m;
    for (int d = 0; d < g.dim(); ++d)
      if (idx[d] < shell[d] || idx[d] >= g.sizes[d] - shell[d]) {
        outer += m;
        break;
      }
    advance(g, idx);
  }
  return all > 0.0 ? outer / all : 0.0;
}

}  // namespace qs
