#include "quadsplit/catalog.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "quadsplit/errors.hpp"

namespace qs {

namespace {

constexpr cdouble kI{0.0, 1.0};

RMat scaled_identity(int n, double s) { return s * RMat::Identity(n, n); }

RMat v_only(double s) {
  RMat m = RMat::Zero(2, 2);
  m(1, 1) = s;
  return m;
}

void require_psd(const RMat& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<RMat> es(a, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw Error(ErrorKind::invalid_argument, std::string(what) + ": A_t is not positive semidefinite");
}

// Transport symbol -i (Mx).xi.
QuadraticSymbol transport_symbol(const RMat& m) {
  const int n = static_cast<int>(m.rows());
  CMat q = CMat::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      q(j, n + k) += -0.5 * kI * m(k, j);
      q(n + k, j) += -0.5 * kI * m(k, j);
    }
  return QuadraticSymbol(n, q);
}

int shear_runs(const std::vector<SplitStep>& steps) {
  int runs = 0;
  int last = -1;
  for (const auto& s : steps) {
    if (s.j != last) ++runs;
    last = s.j;
  }
  return runs;
}

}  // namespace

SplittingProgram harmonic_oscillator(double t, int n) {
  if (!(t >= 0.0)) throw Error(ErrorKind::invalid_argument, "harmonic_oscillator: t must be >= 0");
  if (n < 1) throw Error(ErrorKind::dimension, "harmonic_oscillator: n must be >= 1");
  SplittingProgram p;
  p.dim = n;
  p.t = t;
  p.target = QuadraticSymbol(n, CMat::Identity(2 * n, 2 * n));
  p.provenance = "harmonic";
  p.fft_passes = 2 * n;
  const double g = std::tanh(t) / 2.0;
  p.steps = {SplitStep::gaussian_x(scaled_identity(n, g)),
             SplitStep::gaussian_fourier(scaled_identity(n, std::sinh(2.0 * t) / 2.0)),
             SplitStep::gaussian_x(scaled_identity(n, g))};
  return p;
}

SplittingProgram rotation2d(double theta, double margin) {
  if (!(std::abs(theta) < std::numbers::pi - margin)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg), "near-singular angle %.17g; subdivide into steps of at most %.17g", theta,
                  std::numbers::pi / 2.0);
    throw Error(ErrorKind::singular_parameter, msg);
  }
  RMat m(2, 2);
  m << 0.0, 1.0, -1.0, 0.0;
  SplittingProgram p;
  p.dim = 2;
  p.t = theta;
  p.target = transport_symbol(m);
  p.provenance = "rotation2d";
  p.fft_passes = 6;
  const double a = std::tan(theta / 2.0);
  p.steps = {SplitStep::shear(0, 1, a), SplitStep::shear(1, 0, -std::sin(theta)), SplitStep::shear(0, 1, a)};
  return p;
}

SplittingProgram dilatation(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::invalid_argument, "dilatation: lambda must be > 0");
  const double alpha = 0.5 * std::sqrt(std::abs(1.0 / lambda - 1.0) / lambda);
  const double beta = 0.5 * std::sqrt(std::abs(1.0 - lambda));
  const double eps = lambda <= 1.0 ? 1.0 : -1.0;
  CMat q(2, 2);
  q << 0.0, -0.5 * kI, -0.5 * kI, 0.0;
  SplittingProgram p;
  p.dim = 1;
  p.t = std::log(lambda);
  p.target = QuadraticSymbol(1, q, CVec(), 0.5);
  p.provenance = "dilatation";
  p.fft_passes = 4;
  auto c = [](double v) { return RMat::Constant(1, 1, v); };
  p.steps = {SplitStep::x_quadratic(c(alpha)), SplitStep::fourier_quadratic(c(eps * beta)),
             SplitStep::x_quadratic(c(-beta)), SplitStep::fourier_quadratic(c(-eps * alpha)),
             SplitStep::scalar(-0.5 * std::log(lambda))};
  return p;
}

SplittingProgram reflection1d() {
  const double h = std::numbers::pi / 2.0;
  SplittingProgram p;
  p.dim = 1;
  p.t = 1.0;
  p.target = QuadraticSymbol(1, -h * kI * CMat::Identity(2, 2), CVec(), h * kI);
  p.provenance = "reflection1d (experimental)";
  p.fft_passes = 4;
  auto c = [](double v) { return RMat::Constant(1, 1, v); };
  p.steps = {SplitStep::x_quadratic(c(0.5)),  SplitStep::fourier_quadratic(c(-0.5)), SplitStep::x_quadratic(c(1.0)),
             SplitStep::fourier_quadratic(c(-0.5)), SplitStep::x_quadratic(c(0.5)),
             SplitStep::scalar(-h * kI)};
  return p;
}

SplittingProgram shear_factorize(const RMat& g) {
  const int n = static_cast<int>(g.rows());
  if (n < 1 || g.cols() != n) throw Error(ErrorKind::dimension, "shear_factorize: G must be square");
  const double det = g.determinant();
  if (std::abs(det) < 1e-300) throw Error(ErrorKind::invalid_argument, "shear_factorize: G is singular");
  if (std::abs(det - 1.0) > 1e-10) throw Error(ErrorKind::invalid_argument, "shear_factorize: det G != 1");
  RMat w = g;
  // Row operations E (row_j += alpha row_k) reducing w to I; G = E_1^{-1} E_2^{-1} ...
  std::vector<SplitStep> ops;
  auto row_op = [&](int j, int k, double alpha) {
    if (alpha == 0.0) return;
    w.row(j) += alpha * w.row(k);
    ops.push_back(SplitStep::shear(j, k, -alpha));
  };
  for (int c = 0; c + 1 < n; ++c) {
    if (w(c, c) != 1.0) {
      int piv = -1;
      for (int r = c + 1; r < n; ++r)
        if (piv < 0 || std::abs(w(r, c)) > std::abs(w(piv, c))) piv = r;
      if (std::abs(w(piv, c)) < 1e-300) {
        if (std::abs(w(c, c)) < 1e-300) throw Error(ErrorKind::invalid_argument, "shear_factorize: G is singular");
        row_op(piv, c, 1.0);
      }
      row_op(c, piv, (1.0 - w(c, c)) / w(piv, c));
      w(c, c) = 1.0;
    }
    for (int r = c + 1; r < n; ++r) {
      row_op(r, c, -w(r, c));
      w(r, c) = 0.0;
    }
  }
  for (int c = n - 1; c >= 1; --c)
    for (int r = 0; r < c; ++r) {
      row_op(r, c, -w(r, c));
      w(r, c) = 0.0;
    }
  SplittingProgram p;
  p.dim = n;
  p.t = 1.0;
  p.target = QuadraticSymbol(n);
  p.target_flow = transport_flow(g);
  p.provenance = "shear_factorize";
  p.steps = std::move(ops);
  p.fft_passes = 2 * shear_runs(p.steps);
  return p;
}

SplittingProgram rotation_nd(const RMat& m, double t, const FixedPointOptions& opt) {
  const int n = static_cast<int>(m.rows());
  if (n < 2 || m.cols() != n) throw Error(ErrorKind::dimension, "rotation_nd: M must be square, n >= 2");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int k = 0; k < n; ++k)
    if (std::abs(m(k, k)) > 1e-14 * scale)
      throw Error(ErrorKind::invalid_argument, "rotation_nd: assumption violated, M has a nonzero diagonal entry");
  int col = -1;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (j != i) mn = std::min(mn, std::abs(m(j, i)));
    if (mn > best) {
      best = mn;
      col = i;
    }
  }
  if (col < 0 || best <= 1e-14 * scale)
    throw Error(ErrorKind::invalid_argument,
                "rotation_nd: assumption violated, no column with all off-diagonal entries nonzero");

  auto e = [n](int r, int c) {
    RMat x = RMat::Zero(n, n);
    x(r, c) = 1.0;
    return x;
  };
  // Spaces of matrices y e_k^T (column k, y_k = 0); k != col increasing, then col.
  std::vector<int> order;
  for (int k = 0; k < n; ++k)
    if (k != col) order.push_back(k);
  order.push_back(col);
  const RMat bt = m.transpose();
  SubspaceDecomposition dec;
  dec.size = n;
  for (int k : order) {
    std::vector<RMat> basis;
    for (int r = 0; r < n; ++r)
      if (r != k) basis.push_back(e(r, k));
    dec.b_spaces.push_back(basis);
    RMat bk = RMat::Zero(n, n);
    bk.col(k) = bt.col(k);
    dec.b_star.push_back(bk);
  }
  for (int r = 0; r < n; ++r)
    if (r != col) dec.s_space.push_back(e(r, col));
  const GenericResult res = generic_fixed_point(dec, t, opt);

  SplittingProgram p;
  p.dim = n;
  p.t = t;
  p.target = transport_symbol(m);
  p.provenance = "rotation_nd";
  p.fft_passes = 2 * (n + 1);
  p.log = res.log;
  auto block = [&](int k, const RVec& y) {
    for (int j = 0; j < n; ++j)
      if (j != k) p.steps.push_back(SplitStep::shear(k, j, t * y(j)));
  };
  const RVec ys = res.s.col(col);
  block(col, RVec(res.b.back().col(col) + ys));
  for (int idx = n - 2; idx >= 0; --idx) block(order[idx], res.b[idx].col(order[idx]));
  block(col, RVec(-ys));
  return p;
}

RMat fokker_planck_a(double t) {
  const double et = std::exp(t);
  const double sh = std::sinh(t / 2.0);
  RMat a(2, 2);
  a(0, 0) = 0.5 * (et * et + 2.0 * t + 3.0 - 4.0 * et);
  a(0, 1) = a(1, 0) = -2.0 * sh * sh;
  a(1, 1) = 0.5 * (1.0 - std::exp(-2.0 * t));
  return a;
}

SplittingProgram fokker_planck(double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::invalid_argument, "fokker_planck: t must be >= 0");
  const RMat a = fokker_planck_a(t);
  require_psd(a, "fokker_planck");
  const double et = std::exp(t);
  const double alpha = 0.5 * std::sqrt((1.0 - 1.0 / et) / et);
  const double beta = 0.5 * std::sqrt(et - 1.0);
  CMat q = CMat::Zero(4, 4);
  q(3, 3) = 1.0;
  q(1, 2) = q(2, 1) = 0.5 * kI;
  q(1, 3) = q(3, 1) = -0.5 * kI;
  SplittingProgram p;
  p.dim = 2;
  p.t = t;
  p.target = QuadraticSymbol(2, q, CVec(), -0.5);
  p.provenance = "fokker_planck";
  p.fft_passes = 6;
  p.steps = {SplitStep::x_quadratic(v_only(alpha)),
             SplitStep::fourier_quadratic(v_only(-beta)),
             SplitStep::x_quadratic(v_only(-beta)),
             SplitStep::fourier_quadratic(v_only(alpha)),
             SplitStep::gaussian_fourier(a),
             SplitStep::shear(0, 1, -(et - 1.0)),
             SplitStep::scalar(t / 2.0)};
  return p;
}

RMat kramers_fokker_planck_a(double t) {
  const double th = std::tanh(t);
  const double s = std::sinh(t);
  const double alpha = 0.5 * (t - th * (1.0 - s * s));
  RMat a(2, 2);
  a(0, 0) = alpha / 2.0;
  a(0, 1) = a(1, 0) = s * s / 2.0;
  a(1, 1) = std::sinh(2.0 * t) / 2.0;
  return a;
}

SplittingProgram kramers_fokker_planck(double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::invalid_argument, "kramers_fokker_planck: t must be >= 0");
  const RMat a = kramers_fokker_planck_a(t);
  require_psd(a, "kramers_fokker_planck");
  const double th = std::tanh(t);
  CMat q = CMat::Zero(4, 4);
  q(1, 1) = 1.0;
  q(3, 3) = 1.0;
  q(1, 2) = q(2, 1) = 0.5 * kI;
  SplittingProgram p;
  p.dim = 2;
  p.t = t;
  p.target = QuadraticSymbol(2, q);
  p.provenance = "kramers_fokker_planck";
  p.fft_passes = 4;
  p.steps = {SplitStep::gaussian_x(v_only(th / 2.0)), SplitStep::shear(0, 1, -th),
             SplitStep::gaussian_fourier(a), SplitStep::gaussian_x(v_only(th / 2.0))};
  return p;
}

SplittingProgram affine_linear_split(const QuadraticSymbol& ell, double t) {
  const int n = ell.dim();
  if (ell.Q().cwiseAbs().maxCoeff() != 0.0)
    throw Error(ErrorKind::invalid_argument, "affine_linear_split: nonzero quadratic part");
  if (!is_real(ell)) throw Error(ErrorKind::invalid_argument, "affine_linear_split: symbol must be real");
  const RVec l = ell.Y().real();
  double ct = 0.0;
  for (int j = 0; j < n; ++j) ct += l(j) * l(j + n);
  ct *= t / 2.0;
  SplittingProgram p;
  p.dim = n;
  p.t = t;
  p.target = ell * (-kI);
  p.provenance = "affine_linear";
  int translates = 0;
  for (int j = 0; j < n; ++j)
    if (l(j + n) != 0.0) {
      p.steps.push_back(SplitStep::translate(j, t * l(j + n)));
      ++translates;
    }
  for (int j = 0; j < n; ++j)
    if (l(j) != 0.0) p.steps.push_back(SplitStep::modulate(j, t * l(j)));
  const cdouble gamma = kI * t * (ct + ell.c().real());
  if (gamma != 0.0) p.steps.push_back(SplitStep::scalar(gamma));
  p.fft_passes = 2 * translates;
  return p;
}

TranslateConjugate translate_conjugate_split(const QuadraticSymbol& p) {
  const LowerBoundDecomposition d = lower_bound_decompose(p);
  const int n = p.dim();
  const RMat j = symplectic_j(n).real();
  TranslateConjugate out;
  out.c = d.c;
  out.y = d.y;
  out.q = d.q;
  out.ell = QuadraticSymbol(n, CMat::Zero(2 * n, 2 * n), (-(j * d.y)).cast<cdouble>());
  return out;
}

AffineFlow translate_conjugate_flow(const TranslateConjugate& s) {
  const int n = s.q.dim();
  const QuadraticSymbol c(n, CMat::Zero(2 * n, 2 * n), CVec(), s.c);
  return compose_affine({affine_flow(c, 1.0), affine_flow(s.ell * kI, 1.0), affine_flow(s.q, 1.0),
                         affine_flow(s.ell * (-kI), 1.0)});
}

}  // namespace qs
