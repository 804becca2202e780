#include "quadsplit/oracles.hpp"

#include <cmath>
#include <limits>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "quadsplit/catalog.hpp"
#include "quadsplit/errors.hpp"

namespace qs::oracles {

namespace {

// Spectral derivative -i d/dx on one periodic dim.
CMat spectral_d(const Grid& g, int d) {
  const int n = g.sizes[d];
  const double pi2 = 2.0 * std::acos(-1.0);
  CMat f(n, n), finv(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double ph = pi2 * a * b / n;
      f(a, b) = std::polar(1.0, -ph);
      finv(a, b) = std::polar(1.0 / n, ph);
    }
  CVec xi(n);
  for (int i = 0; i < n; ++i) xi(i) = g.is_nyquist(d, i) ? 0.0 : g.xi(d, i);
  return finv * xi.asDiagonal() * f;
}

CMat position(const Grid& g, int d) {
  CVec x(g.sizes[d]);
  for (int i = 0; i < g.sizes[d]; ++i) x(i) = g.x(d, i);
  return x.asDiagonal();
}

// Full operator from per-dim factors (dim 0 slowest, matching the row-major field layout).
CMat kron_all(const std::vector<CMat>& f) {
  CMat out = f[0];
  for (std::size_t d = 1; d < f.size(); ++d) {
    CMat next = Eigen::kroneckerProduct(out, f[d]).eval();
    out = std::move(next);
  }
  return out;
}

}  // namespace

DenseOperator discretize_weyl(const QuadraticSymbol& p, const Grid& grid) {
  grid.validate();
  const int n = grid.dim();
  if (n != p.dim()) throw Error(ErrorKind::dimension, "discretize_weyl: symbol and grid dims differ");
  if (n > 2) throw Error(ErrorKind::dimension, "discretize_weyl: 1-D or 2-D grids only");
  if (grid.total() > kMaxDenseUnknowns) throw Error(ErrorKind::invalid_argument, "discretize_weyl: grid exceeds 4096 points");

  std::vector<CMat> ident(n), z1(2 * n);
  for (int d = 0; d < n; ++d) {
    ident[d] = CMat::Identity(grid.sizes[d], grid.sizes[d]);
    z1[d] = position(grid, d);
    z1[n + d] = spectral_d(grid, d);
  }
  auto dim_of = [n](int a) { return a % n; };
  // Z_a Z_b as per-dim factors.
  auto product = [&](int a, int b) {
    std::vector<CMat> f = ident;
    if (dim_of(a) == dim_of(b)) {
      f[dim_of(a)] = z1[a] * z1[b];
    } else {
      f[dim_of(a)] = z1[a];
      f[dim_of(b)] = z1[b];
    }
    return kron_all(f);
  };
  const std::size_t total = grid.total();
  CMat m = CMat::Zero(total, total);
  for (int a = 0; a < 2 * n; ++a)
    for (int b = a; b < 2 * n; ++b) {
      const cdouble q = p.Q()(a, b);
      if (q == 0.0) continue;
      if (a == b) {
        m += q * product(a, a);
      } else {
        // 2 Q_ab (Z_a Z_b + Z_b Z_a)/2
        m += q * (product(a, b) + product(b, a));
      }
    }
  for (int a = 0; a < 2 * n; ++a) {
    const cdouble y = p.Y().size() ? p.Y()(a) : cdouble(0.0);
    if (y == 0.0) continue;
    std::vector<CMat> f = ident;
    f[dim_of(a)] = z1[a];
    m += y * kron_all(f);
  }
  m.diagonal().array() += p.c();
  return {grid, std::move(m)};
}

double hermitian_floor(const DenseOperator& op) {
  const CMat h = 0.5 * (op.matrix + op.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CMat dense_semigroup(const DenseOperator& op, double t) {
  if (t < 0.0) throw Error(ErrorKind::invalid_argument, "dense_semigroup: t must be >= 0");
  const double floor = hermitian_floor(op);
  if (-floor * t > 700.0)
    throw Error(ErrorKind::not_bounded_below, "dense_semigroup: discretization grows too fast; e^{-t op} overflows");
  const CMat a = -t * op.matrix;
  return a.exp();
}

CVec dense_semigroup_apply(const DenseOperator& op, double t, const CVec& v) {
  if (t < 0.0) throw Error(ErrorKind::invalid_argument, "dense_semigroup_apply: t must be >= 0");
  const double nrm = op.matrix.cwiseAbs().colwise().sum().maxCoeff();
  const int sub = std::max(1, static_cast<int>(std::ceil(t * nrm)));
  const double h = t / sub;
  CVec u = v;
  for (int s = 0; s < sub; ++s) {
    CVec term = u, acc = u;
    for (int k = 1; k < 200; ++k) {
      term = (-h / k) * (op.matrix * term);
      acc += term;
      if (term.norm() <= 1e-18 * acc.norm()) break;
    }
    u = acc;
  }
  return u;
}

CVec to_vector(const StateField& f) {
  if (!f.all_physical()) throw Error(ErrorKind::invalid_argument, "to_vector: field must be physical");
  return Eigen::Map<const CVec>(f.values.data(), static_cast<Eigen::Index>(f.values.size()));
}

StateField from_vector(const Grid& g, const CVec& v) {
  StateField f(g);
  if (static_cast<std::size_t>(v.size()) != f.values.size()) throw Error(ErrorKind::dimension, "from_vector: size mismatch");
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = v(static_cast<Eigen::Index>(i));
  return f;
}

Field ground_state() {
  return [](const std::vector<double>& x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return std::complex<double>(std::exp(-0.5 * r2), 0.0);
  };
}

Field ground_state_decay(int n, double t) {
  const double s = std::exp(-n * t);
  return [s](const std::vector<double>& x) { return s * ground_state()(x); };
}

Field transport(const Field& u0, const RMat& b, double t) {
  const RMat e = (t * b).exp();
  return [u0, e](const std::vector<double>& x) {
    const RVec y = e * Eigen::Map<const RVec>(x.data(), static_cast<Eigen::Index>(x.size()));
    return u0(std::vector<double>(y.data(), y.data() + y.size()));
  };
}

Field dilated(const Field& u0, double lambda) {
  return [u0, lambda](const std::vector<double>& x) {
    std::vector<double> y(x);
    for (double& v : y) v *= lambda;
    return u0(y);
  };
}

Field maxwellian() {
  return [](const std::vector<double>& x) { return std::complex<double>(std::exp(-0.5 * x[1] * x[1]), 0.0); };
}

Field kfp_decay(double t) {
  return [t](const std::vector<double>& x) { return std::complex<double>(std::exp(-t - 0.5 * x[1] * x[1]), 0.0); };
}

Field harmonic_gaussian(double x0, double t) {
  const double b = x0 * std::exp(-2.0 * t);
  const double g = -0.5 * x0 * x0 + 0.25 * x0 * x0 * (1.0 - std::exp(-4.0 * t)) - t;
  return [b, g](const std::vector<double>& x) { return std::complex<double>(std::exp(-0.5 * x[0] * x[0] + b * x[0] + g), 0.0); };
}

SplittingProgram strang_harmonic(double t, int n) {
  SplittingProgram p = harmonic_oscillator(t, n);
  const RMat id = RMat::Identity(n, n);
  p.steps = {SplitStep::gaussian_x(0.5 * t * id), SplitStep::gaussian_fourier(t * id), SplitStep::gaussian_x(0.5 * t * id)};
  p.provenance = "strang";
  p.fft_passes = 2 * n;
  return p;
}

}  // namespace qs::oracles
