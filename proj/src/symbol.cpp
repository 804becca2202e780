#include "quadsplit/symbol.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "quadsplit/errors.hpp"

namespace qs {

namespace {

constexpr cdouble kI{0.0, 1.0};

void check_dim(const QuadraticSymbol& a, const QuadraticSymbol& b, const char* what) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::dimension, std::string(what) + ": dimension mismatch");
}

nlohmann::json flat(const CMat& m, bool imag) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(imag ? m(i, j).imag() : m(i, j).real());
  return a;
}

}  // namespace

QuadraticSymbol::QuadraticSymbol(int n) : QuadraticSymbol(n, CMat::Zero(2 * n, 2 * n)) {}

QuadraticSymbol::QuadraticSymbol(int n, CMat q, CVec y, cdouble c)
    : n_(n), q_(std::move(q)), y_(std::move(y)), c_(c) {
  if (n < 1) throw Error(ErrorKind::dimension, "symbol: dim must be >= 1");
  if (q_.rows() != 2 * n || q_.cols() != 2 * n)
    throw Error(ErrorKind::dimension, "symbol: Q must be 2n x 2n");
  if (y_.size() == 0) y_ = CVec::Zero(2 * n);
  if (y_.size() != 2 * n) throw Error(ErrorKind::dimension, "symbol: Y must have 2n entries");
  if (!q_.allFinite() || !y_.allFinite() || !std::isfinite(c_.real()) || !std::isfinite(c_.imag()))
    throw Error(ErrorKind::invalid_argument, "symbol: non-finite coefficient");
  const double scale = std::max(1.0, q_.cwiseAbs().maxCoeff());
  if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > 1e-13 * scale)
    throw Error(ErrorKind::invalid_argument, "symbol: Q is not symmetric");
  q_ = (0.5 * (q_ + q_.transpose())).eval();
}

cdouble QuadraticSymbol::operator()(const CVec& x) const {
  return (x.transpose() * q_ * x)(0, 0) + (y_.transpose() * x)(0, 0) + c_;
}

QuadraticSymbol QuadraticSymbol::operator+(const QuadraticSymbol& o) const {
  check_dim(*this, o, "symbol +");
  return QuadraticSymbol(n_, q_ + o.q_, y_ + o.y_, c_ + o.c_);
}

QuadraticSymbol QuadraticSymbol::operator-(const QuadraticSymbol& o) const {
  check_dim(*this, o, "symbol -");
  return QuadraticSymbol(n_, q_ - o.q_, y_ - o.y_, c_ - o.c_);
}

QuadraticSymbol QuadraticSymbol::operator*(cdouble s) const {
  return QuadraticSymbol(n_, s * q_, s * y_, s * c_);
}

nlohmann::json QuadraticSymbol::to_json() const {
  return {{"n", n_},
          {"Q_re", flat(q_, false)},
          {"Q_im", flat(q_, true)},
          {"Y_re", flat(y_, false)},
          {"Y_im", flat(y_, true)},
          {"c_re", c_.real()},
          {"c_im", c_.imag()}};
}

QuadraticSymbol QuadraticSymbol::from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  if (n < 1) throw Error(ErrorKind::config, "symbol record: n must be >= 1");
  const int m = 2 * n;
  auto read = [&](const char* re, const char* im, Eigen::Index rows, Eigen::Index cols) {
    CMat out = CMat::Zero(rows, cols);
    const auto& r = j.at(re);
    if (r.size() != static_cast<std::size_t>(rows * cols))
      throw Error(ErrorKind::config, std::string("symbol record: wrong size for ") + re);
    const bool has_im = j.contains(im);
    if (has_im && j.at(im).size() != r.size())
      throw Error(ErrorKind::config, std::string("symbol record: wrong size for ") + im);
    for (Eigen::Index k = 0; k < rows * cols; ++k)
      out(k / cols, k % cols) = cdouble(r[k].get<double>(), has_im ? j.at(im)[k].get<double>() : 0.0);
    return out;
  };
  CMat q = read("Q_re", "Q_im", m, m);
  CVec y = j.contains("Y_re") ? CVec(read("Y_re", "Y_im", m, 1)) : CVec::Zero(m);
  cdouble c(j.value("c_re", 0.0), j.value("c_im", 0.0));
  return QuadraticSymbol(n, std::move(q), std::move(y), c);
}

CMat symplectic_j(int n) {
  CMat j = CMat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -CMat::Identity(n, n);
  return j;
}

double FlowMatrix::symplectic_residual() const {
  const CMat j = symplectic_j(n);
  return (m.transpose() * j * m - j).norm();
}

AffineFlow AffineFlow::identity(int n) {
  AffineFlow f;
  f.linear = {n, CMat::Identity(2 * n, 2 * n)};
  f.shift = Eigen::RowVectorXcd::Zero(2 * n);
  f.column = CVec::Zero(2 * n);
  f.phase = 0.0;
  return f;
}

QuadraticSymbol poisson_bracket(const QuadraticSymbol& p1, const QuadraticSymbol& p2) {
  check_dim(p1, p2, "poisson_bracket");
  const CMat j = symplectic_j(p1.dim());
  const CMat a = p1.Q() * j * p2.Q();
  CMat q = -2.0 * (a + a.transpose());
  CVec y = -2.0 * p1.Q() * j * p2.Y() + 2.0 * p2.Q() * j * p1.Y();
  cdouble c = -(p1.Y().transpose() * j * p2.Y())(0, 0);
  return QuadraticSymbol(p1.dim(), std::move(q), std::move(y), c);
}

FlowMatrix hamiltonian_flow(const QuadraticSymbol& q, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::invalid_argument, "hamiltonian_flow: non-finite t");
  const int n = q.dim();
  return {n, expm(cdouble(0.0, -2.0 * t) * symplectic_j(n) * q.Q())};
}

std::vector<int> basis_b_permutation(int n) {
  std::vector<int> perm(2 * n + 2);
  for (int k = 0; k < 2 * n + 2; ++k) {
    if (k < n)
      perm[k] = k;
    else if (k == n)
      perm[k] = 2 * n;
    else if (k <= 2 * n)
      perm[k] = k - 1;
    else
      perm[k] = 2 * n + 1;
  }
  return perm;
}

QuadraticSymbol homogenize(const QuadraticSymbol& p, bool basis_b) {
  const int n = p.dim();
  const int m = n + 1;
  auto slot = [n](int i) { return i < n ? i : i + 1; };
  CMat q = CMat::Zero(2 * m, 2 * m);
  for (int i = 0; i < 2 * n; ++i) {
    for (int k = 0; k < 2 * n; ++k) q(slot(i), slot(k)) = p.Q()(i, k);
    q(slot(i), n) += 0.5 * p.Y()(i);
    q(n, slot(i)) += 0.5 * p.Y()(i);
  }
  q(n, n) = p.c();
  if (!basis_b) return QuadraticSymbol(m, std::move(q));
  const auto perm = basis_b_permutation(n);
  CMat qb(2 * m, 2 * m);
  for (int a = 0; a < 2 * m; ++a)
    for (int b = 0; b < 2 * m; ++b) qb(perm[a], perm[b]) = q(a, b);
  return QuadraticSymbol(m, std::move(qb));
}

AffineFlow affine_flow(const QuadraticSymbol& p, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::invalid_argument, "affine_flow: non-finite t");
  const int n = p.dim();
  const CMat j = symplectic_j(n);
  const PhiPair phi = phi_functions(cdouble(0.0, -2.0 * t) * j * p.Q());
  const Eigen::RowVectorXcd l = t * p.Y().transpose();
  AffineFlow f;
  f.linear = {n, phi.exp};
  f.column = phi.phi1 * (-kI * j * l.transpose());
  f.shift = kI * l * phi.phi1;
  f.phase = (l * phi.phi2 * j * l.transpose())(0, 0) + 2.0 * kI * t * p.c();
  return f;
}

KappaSeries kappa_series(const QuadraticSymbol& p, double t, int max_terms) {
  const CMat j = symplectic_j(p.dim());
  const CMat jq = j * p.Q();
  CVec v = j * p.Y();  // (JQ)^k J L^T
  KappaSeries out{0.0, 0, false};
  // coeff_k = 4^k t^{2k+3} / (2k+3)!
  double coeff = t * t * t / 6.0;
  double largest = 0.0;
  for (int k = 0; k < max_terms; ++k) {
    const cdouble term = coeff * (v.transpose() * p.Q() * v)(0, 0);
    out.value += term;
    out.terms = k + 1;
    largest = std::max(largest, std::abs(term));
    if (std::abs(term) <= 1e-17 * std::max(std::abs(out.value), 1e-300) || term == 0.0) {
      out.converged = largest <= 1e8 * std::max(std::abs(out.value), 1e-300) || out.value == 0.0;
      return out;
    }
    v = jq * v;
    coeff *= 4.0 * t * t / ((2.0 * k + 4.0) * (2.0 * k + 5.0));
    if (!std::isfinite(coeff) || !v.allFinite()) break;
  }
  out.converged = false;
  return out;
}

AffineFlow affine_flow_series(const QuadraticSymbol& p, double t) {
  AffineFlow f = affine_flow(p, t);
  const KappaSeries k = kappa_series(p, t);
  if (!k.converged) throw Error(ErrorKind::divergence, "kappa series did not converge");
  f.phase = 2.0 * kI * (k.value + t * p.c());
  return f;
}

AffineFlow compose_affine(const std::vector<AffineFlow>& flows) {
  if (flows.empty()) throw Error(ErrorKind::invalid_argument, "compose_affine: empty list");
  AffineFlow acc = flows.front();
  for (std::size_t k = 1; k < flows.size(); ++k) {
    const AffineFlow& f = flows[k];
    if (f.dim() != acc.dim()) throw Error(ErrorKind::dimension, "compose_affine: dimension mismatch");
    AffineFlow r;
    r.linear = {acc.dim(), acc.linear.m * f.linear.m};
    r.column = acc.linear.m * f.column + acc.column;
    r.shift = acc.shift * f.linear.m + f.shift;
    r.phase = (acc.shift * f.column)(0, 0) + acc.phase + f.phase;
    acc = std::move(r);
  }
  return acc;
}

CMat to_dense(const AffineFlow& f) {
  const int m = 2 * f.dim();
  CMat d = CMat::Zero(m + 2, m + 2);
  d.topLeftCorner(m, m) = f.linear.m;
  d.block(0, m, m, 1) = f.column;
  d(m, m) = 1.0;
  d.block(m + 1, 0, 1, m) = f.shift;
  d(m + 1, m) = f.phase;
  d(m + 1, m + 1) = 1.0;
  return d;
}

AffineFlow from_dense(const CMat& d) {
  const Eigen::Index m = d.rows() - 2;
  if (m < 2 || m % 2 != 0 || d.cols() != d.rows())
    throw Error(ErrorKind::dimension, "from_dense: bad shape");
  AffineFlow f;
  f.linear = {static_cast<int>(m / 2), d.topLeftCorner(m, m)};
  f.column = d.block(0, m, m, 1);
  f.shift = d.block(m + 1, 0, 1, m);
  f.phase = d(m + 1, m);
  return f;
}

CMat dense_affine_flow(const QuadraticSymbol& p, double t) {
  const int n = p.dim();
  const QuadraticSymbol h = homogenize(p, true);
  CMat jb = CMat::Zero(2 * n + 2, 2 * n + 2);
  jb.topLeftCorner(2 * n, 2 * n) = symplectic_j(n);
  jb.bottomRightCorner(2, 2) = symplectic_j(1);
  return expm(cdouble(0.0, -2.0 * t) * jb * h.Q());
}

double frobenius_distance(const AffineFlow& a, const AffineFlow& b) {
  return (to_dense(a) - to_dense(b)).norm();
}

double frobenius_norm(const AffineFlow& a) { return to_dense(a).norm(); }

SpPlusCheck is_nonneg_symplectic(const FlowMatrix& t, double tol) {
  const CMat mj = -kI * symplectic_j(t.n);
  CMat h = t.m.adjoint() * mj * t.m - mj;
  h = (0.5 * (h + h.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  SpPlusCheck out;
  out.symplectic_residual = t.symplectic_residual() / std::max(1.0, t.m.squaredNorm());
  out.margin = es.eigenvalues().minCoeff();
  out.ok = out.symplectic_residual <= tol && out.margin >= -tol;
  return out;
}

bool is_real(const QuadraticSymbol& p, double tol) {
  return p.Q().imag().cwiseAbs().maxCoeff() <= tol && p.Y().imag().cwiseAbs().maxCoeff() <= tol &&
         std::abs(p.c().imag()) <= tol;
}

LowerBoundDecomposition lower_bound_decompose(const QuadraticSymbol& p, double tol) {
  if (!is_real(p, tol)) throw Error(ErrorKind::invalid_argument, "lower_bound_decompose: symbol is not real");
  const RMat q = p.Q().real();
  const RVec z = p.Y().real();
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<RMat> es(q);
  if (es.eigenvalues().minCoeff() < -tol * scale)
    throw Error(ErrorKind::not_bounded_below, "not bounded below: quadratic part has a negative eigenvalue");
  Eigen::JacobiSVD<RMat> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(tol);
  const RVec y = -0.5 * svd.solve(z);
  if ((q * y + 0.5 * z).norm() > tol * std::max(1.0, z.norm()))
    throw Error(ErrorKind::not_bounded_below, "not bounded below: linear part has a component in ker Q");
  const double c = p(y.cast<cdouble>()).real();
  return {p.quadratic_part(), y, c};
}

}  // namespace qs
