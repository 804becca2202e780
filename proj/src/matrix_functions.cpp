#include "quadsplit/matrix_functions.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <limits>

#include "quadsplit/errors.hpp"

namespace qs {

double norm1(const CMat& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

namespace {

constexpr std::array<double, 4> kPade3{120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                       25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                        30270240.0,    2162160.0,    110880.0,     3960.0,
                                        90.0,          1.0};
constexpr std::array<double, 14> kPade13{
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

constexpr std::array<double, 5> kTheta{1.495585217958292e-2, 2.539398330063230e-1,
                                       9.504178996162932e-1, 2.097847961257068e0,
                                       5.371920351148152e0};

template <std::size_t N>
CMat pade_low(const CMat& a, const std::array<double, N>& b) {
  const Eigen::Index n = a.rows();
  const CMat id = CMat::Identity(n, n);
  const CMat a2 = a * a;
  CMat u = b[1] * id;
  CMat v = b[0] * id;
  CMat pw = id;
  for (std::size_t k = 2; k + 1 < N + 1; k += 2) {
    pw = pw * a2;
    v += b[k] * pw;
    if (k + 1 < N) u += b[k + 1] * pw;
  }
  u = a * u;
  return (v - u).partialPivLu().solve(v + u);
}

CMat pade13(const CMat& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const CMat id = CMat::Identity(n, n);
  const CMat a2 = a * a;
  const CMat a4 = a2 * a2;
  const CMat a6 = a4 * a2;
  CMat u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
           b[1] * id;
  u = a * u;
  CMat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
           b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

CMat expm(const CMat& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::dimension, "expm: matrix not square");
  if (!a.allFinite()) throw Error(ErrorKind::invalid_argument, "expm: non-finite input");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  const double nrm = norm1(a);
  if (nrm <= kTheta[0]) return pade_low(a, kPade3);
  if (nrm <= kTheta[1]) return pade_low(a, kPade5);
  if (nrm <= kTheta[2]) return pade_low(a, kPade7);
  if (nrm <= kTheta[3]) return pade_low(a, kPade9);
  int s = 0;
  if (nrm > kTheta[4]) s = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / kTheta[4]))));
  CMat r = pade13(a / std::ldexp(1.0, s));
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

double branch_distance(const CMat& a) {
  Eigen::ComplexEigenSolver<CMat> es(a, false);
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const cdouble l = es.eigenvalues()(i);
    d = std::min(d, l.real() <= 0.0 ? std::abs(l.imag()) : std::abs(l));
  }
  return d;
}

namespace {

// Denman-Beavers product form.
CMat sqrtm_db(const CMat& a) {
  const Eigen::Index n = a.rows();
  const CMat id = CMat::Identity(n, n);
  CMat m = a;
  CMat y = a;
  for (int k = 0; k < 100; ++k) {
    const CMat minv = m.partialPivLu().inverse();
    y = 0.5 * y * (id + minv);
    m = 0.5 * (id + 0.5 * (m + minv));
    if (norm1(m - id) <= 1e-15 * static_cast<double>(n)) break;
  }
  return y;
}

struct Quadrature {
  RVec nodes;
  RVec weights;
};

// Gauss-Legendre rule on [0, 1] by Golub-Welsch.
Quadrature gauss_legendre01(int m) {
  RMat jac = RMat::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(jac);
  Quadrature q;
  q.nodes = (es.eigenvalues().array() + 1.0) / 2.0;
  q.weights = es.eigenvectors().row(0).transpose().array().square();
  return q;
}

}  // namespace

CMat logm(const CMat& a, double branch_tol) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::dimension, "logm: matrix not square");
  if (!a.allFinite()) throw Error(ErrorKind::invalid_argument, "logm: non-finite input");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  if (branch_distance(a) <= branch_tol)
    throw Error(ErrorKind::log_branch, "logm: spectrum touches the negative real axis");
  const CMat id = CMat::Identity(n, n);
  CMat t = a;
  int s = 0;
  while (norm1(t - id) > 0.25) {
    if (++s > 64) throw Error(ErrorKind::log_branch, "logm: square roots did not converge");
    t = sqrtm_db(t);
  }
  static const Quadrature q = gauss_legendre01(10);
  const CMat x = t - id;
  CMat r = CMat::Zero(n, n);
  for (Eigen::Index j = 0; j < q.nodes.size(); ++j)
    r += q.weights(j) * (id + q.nodes(j) * x).partialPivLu().solve(x);
  return std::ldexp(1.0, s) * r;
}

PhiPair phi_functions(const CMat& a) {
  const Eigen::Index m = a.rows();
  CMat aug = CMat::Zero(3 * m, 3 * m);
  aug.topLeftCorner(m, m) = a;
  aug.block(0, m, m, m).setIdentity();
  aug.block(m, 2 * m, m, m).setIdentity();
  const CMat e = expm(aug);
  return {e.topLeftCorner(m, m), e.block(0, m, m, m), e.block(0, 2 * m, m, m)};
}

}  // namespace qs
