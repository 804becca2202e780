#include "quadsplit/schrodinger.hpp"

#include <cmath>
#include <cstdio>

#include "quadsplit/errors.hpp"

namespace qs {

namespace {

constexpr cdouble kI{0.0, 1.0};

RMat strict_lower(const RMat& m) { return m.triangularView<Eigen::StrictlyLower>(); }
RMat strict_upper(const RMat& m) { return m.triangularView<Eigen::StrictlyUpper>(); }

RMat row_only(const RMat& m, Eigen::Index j) {
  RMat r = RMat::Zero(m.rows(), m.cols());
  r.row(j) = m.row(j);
  return r;
}

RMat blocks(const RMat& a, const RMat& b, const RMat& c, const RMat& d) {
  const Eigen::Index n = a.rows();
  RMat m(2 * n, 2 * n);
  m << a, b, c, d;
  return m;
}

struct State {
  RMat A, L, U, V;
};

struct Split {
  RMat Vt, At, Lt, Ut, D;
};

Split split_log(const State& s, double t, double branch_tol) {
  const Eigen::Index n = s.A.rows();
  const RMat id = RMat::Identity(n, n);
  const RMat z = RMat::Zero(n, n);
  RMat p = RMat::Identity(2 * n, 2 * n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const RMat uj = row_only(s.U, j);
    p = p * blocks(id + t * uj, z, z, id - t * uj.transpose());
  }
  p = p * blocks(id, 2.0 * t * s.A, z, id);
  for (Eigen::Index j = 1; j < n; ++j) {
    const RMat lj = row_only(s.L, j);
    p = p * blocks(id + t * lj, z, z, id - t * lj.transpose());
  }
  p = p * blocks(id, z, -2.0 * t * s.V, id);
  const CMat lg = logm(p.cast<cdouble>(), branch_tol);
  if (lg.imag().norm() > 1e-9 * std::max(1.0, lg.real().norm()))
    throw Error(ErrorKind::log_branch, "logarithm of P is not real");
  RMat j = RMat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = id;
  j.bottomLeftCorner(n, n) = -id;
  const RMat sm = -(1.0 / t) * j * lg.real();
  const RMat m21 = sm.bottomLeftCorner(n, n);
  Split out;
  out.Vt = 0.5 * sm.topLeftCorner(n, n);
  out.At = 0.5 * sm.bottomRightCorner(n, n);
  out.Lt = strict_lower(m21);
  out.Ut = strict_upper(m21);
  out.D = RMat::Zero(n, n);
  out.D.diagonal() = m21.diagonal() / t;
  return out;
}

struct Attempt {
  bool ok = false;
  SchrodingerCoefficients c;
  std::string why;
};

Attempt iterate(const RMat& V, const RMat& B, double t, const FixedPointOptions& opt) {
  const Eigen::Index n = V.rows();
  const RMat id = RMat::Identity(n, n);
  const RMat lb = strict_lower(B);
  const RMat ub = strict_upper(B);
  State s{0.5 * id, lb, ub, V};
  Attempt at;
  at.c.t = t;
  double first = -1.0;
  for (int k = 0; k <= opt.max_iter; ++k) {
    Split sp;
    try {
      sp = split_log(s, t, opt.log_branch_tol);
    } catch (const Error& e) {
      at.why = e.what();
      return at;
    }
    const RMat corr = 0.5 * t * (sp.D * B - B * sp.D) + 0.5 * t * t * sp.D * sp.D;
    const double r = std::sqrt((sp.At - 0.5 * id).squaredNorm() + (sp.Lt - lb).squaredNorm() +
                               (sp.Ut - ub).squaredNorm() + (sp.Vt - V - corr).squaredNorm());
    at.c.residuals.push_back(r);
    at.c.log.push_back({{"k", k}, {"residual", r}, {"digest", coefficient_digest({&s.A, &s.L, &s.U, &s.V})}});
    at.c.iterations = k;
    at.c.residual = r;
    at.c.A = s.A;
    at.c.L = s.L;
    at.c.U = s.U;
    at.c.V_ell = -0.5 * sp.D;
    at.c.V_r = s.V + 0.5 * sp.D;
    if (!std::isfinite(r)) {
      at.why = "non-finite residual";
      return at;
    }
    if (first < 0) first = r;
    if (r <= opt.tol) {
      at.ok = true;
      return at;
    }
    if (r > 1e3 * std::max(first, 1e-300)) {
      at.why = "residual growth";
      return at;
    }
    s.A += 0.5 * id - sp.At;
    s.L += lb - sp.Lt;
    s.U += ub - sp.Ut;
    s.V += V - sp.Vt + corr;
  }
  at.why = "no convergence within max_iter";
  return at;
}

}  // namespace

QuadraticSymbol schrodinger_symbol(const RMat& V, const RMat& B) {
  const Eigen::Index n = V.rows();
  CMat q = CMat::Zero(2 * n, 2 * n);
  q.topLeftCorner(n, n) = kI * V.cast<cdouble>();
  q.bottomRightCorner(n, n) = 0.5 * kI * CMat::Identity(n, n);
  q.topRightCorner(n, n) = 0.5 * kI * B.transpose().cast<cdouble>();
  q.bottomLeftCorner(n, n) = 0.5 * kI * B.cast<cdouble>();
  return QuadraticSymbol(static_cast<int>(n), q);
}

SchrodingerCoefficients schrodinger_coefficients(const RMat& V, const RMat& B, double t,
                                                 const FixedPointOptions& opt) {
  const Eigen::Index n = V.rows();
  if (n < 1 || V.cols() != n || B.rows() != n || B.cols() != n)
    throw Error(ErrorKind::dimension, "schrodinger: V and B must be n x n");
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, V.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::invalid_argument, "schrodinger: V must be symmetric");
  if ((B + B.transpose()).norm() > 1e-12) throw Error(ErrorKind::invalid_argument, "schrodinger: B must be skew");
  const RMat vs = 0.5 * (V + V.transpose());
  if (t == 0.0) {
    SchrodingerCoefficients c;
    c.A = 0.5 * RMat::Identity(n, n);
    c.L = strict_lower(B);
    c.U = strict_upper(B);
    c.V_r = vs;
    c.V_ell = RMat::Zero(n, n);
    return c;
  }
  Attempt at = iterate(vs, B, t, opt);
  if (at.ok) return std::move(at.c);
  double safe = 0.0;
  if (opt.bisect_on_divergence)
    safe = largest_convergent_t([&](double tt) { return iterate(vs, B, tt, opt).ok; }, t, opt.bisection_steps);
  char msg[160];
  std::snprintf(msg, sizeof(msg), "schrodinger iteration diverged at t=%.17g (%s); largest convergent t=%.17g", t,
                at.why.c_str(), safe);
  throw DivergenceError(msg, safe);
}

SplittingProgram schrodinger_program(const SchrodingerCoefficients& c, const RMat& V, const RMat& B) {
  const int n = static_cast<int>(V.rows());
  const double t = c.t;
  SplittingProgram p;
  p.dim = n;
  p.t = t;
  p.target = schrodinger_symbol(V, B);
  p.provenance = "schrodinger";
  p.fft_passes = 2 * n;
  p.log = c.log;
  p.steps.push_back(SplitStep::x_quadratic(-t * c.V_r));
  for (int j = n - 1; j >= 1; --j)
    for (int m = 0; m < j; ++m) p.steps.push_back(SplitStep::shear(j, m, -t * c.L(j, m)));
  p.steps.push_back(SplitStep::fourier_quadratic(t * c.A));
  for (int j = n - 2; j >= 0; --j)
    for (int m = j + 1; m < n; ++m) p.steps.push_back(SplitStep::shear(j, m, -t * c.U(j, m)));
  p.steps.push_back(SplitStep::x_quadratic(-t * c.V_ell));
  return p;
}

}  // namespace qs
