#include "quadsplit/generic.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "quadsplit/errors.hpp"

namespace qs {

namespace {

RVec vec(const RMat& m) { return Eigen::Map<const RVec>(m.data(), m.size()); }

RMat unvec(const RVec& v, int size) { return Eigen::Map<const RMat>(v.data(), size, size); }

RMat bracket(const RMat& a, const RMat& b) { return a * b - b * a; }

// Orthonormal basis of the column span, dropping singular values below rel_tol * max(1, sigma_max).
RMat orth(const RMat& m, double rel_tol) {
  if (m.cols() == 0) return RMat(m.rows(), 0);
  Eigen::JacobiSVD<RMat> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

struct Setup {
  int size = 0;
  RMat bb;                                   // columns: vec of b basis elements
  std::vector<std::pair<int, int>> ranges;   // column range of each b space
  Eigen::CompleteOrthogonalDecomposition<RMat> bcod;
  RMat r;                                    // orthonormal basis of the complement
  RMat psi_inv;                              // s coordinates from r coordinates
  RMat s_basis;                              // columns: vec of s basis elements
  RMat b_star;

  std::vector<RMat> project_b(const RMat& g) const {
    const RVec c = bcod.solve(vec(g));
    std::vector<RMat> out;
    for (const auto& [lo, hi] : ranges) out.push_back(unvec(bb.middleCols(lo, hi - lo) * c.segment(lo, hi - lo), size));
    return out;
  }
  RVec project_r(const RMat& g) const { return r.transpose() * vec(g); }
  RMat s_from(const RVec& coords) const {
    return coords.size() ? unvec(s_basis * coords, size) : RMat::Zero(size, size);
  }
};

Setup make_setup(const SubspaceDecomposition& dec) {
  dec.validate();
  Setup st;
  st.size = dec.size;
  const Eigen::Index d2 = static_cast<Eigen::Index>(dec.size) * dec.size;
  std::vector<RVec> cols;
  for (const auto& space : dec.b_spaces) {
    const int lo = static_cast<int>(cols.size());
    for (const auto& m : space) cols.push_back(vec(m));
    st.ranges.emplace_back(lo, static_cast<int>(cols.size()));
  }
  st.bb.resize(d2, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) st.bb.col(k) = cols[k];
  st.bcod.compute(st.bb);
  st.b_star = dec.b_star_sum();

  const Eigen::Index ns = static_cast<Eigen::Index>(dec.s_space.size());
  st.s_basis.resize(d2, ns);
  RMat ad_s(d2, ns);
  for (Eigen::Index k = 0; k < ns; ++k) {
    st.s_basis.col(k) = vec(dec.s_space[k]);
    ad_s.col(k) = vec(bracket(st.b_star, dec.s_space[k]));
  }
  // Brackets of b elements stand in for the closure of the algebra spanned by b and ad(s).
  std::vector<RVec> brk;
  const std::size_t nb = cols.size();
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = i + 1; j < nb; ++j)
      brk.push_back(vec(bracket(unvec(cols[i], dec.size), unvec(cols[j], dec.size))));
  RMat extra(d2, ns + static_cast<Eigen::Index>(brk.size()));
  extra.leftCols(ns) = ad_s;
  for (std::size_t k = 0; k < brk.size(); ++k) extra.col(ns + k) = brk[k];

  const RMat qb = orth(st.bb, 1e-12);
  extra -= qb * (qb.transpose() * extra);
  st.r = orth(extra, 1e-10);
  const Eigen::Index rdim = st.r.cols();
  if (rdim == 0) {
    st.psi_inv = RMat::Zero(ns, 0);
    return st;
  }
  const RMat psi = st.r.transpose() * ad_s;
  Eigen::JacobiSVD<RMat> svd(psi, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  if (sv.size() < rdim || sv(rdim - 1) <= cut)
    throw Error(ErrorKind::rank_deficient,
                "Psi not invertible: ad(b_*) restricted to s does not cover the complement of b");
  const RMat v = svd.matrixV().leftCols(rdim);
  const RMat u = svd.matrixU().leftCols(rdim);
  st.psi_inv = v * sv.head(rdim).cwiseInverse().asDiagonal() * u.transpose();
  return st;
}

RVec s_star_coords(const Setup& st, const SubspaceDecomposition& dec) {
  RMat sum = RMat::Zero(dec.size, dec.size);
  for (std::size_t i = 0; i < dec.b_star.size(); ++i)
    for (std::size_t j = i + 1; j < dec.b_star.size(); ++j) sum += bracket(dec.b_star[i], dec.b_star[j]);
  return -0.5 * st.psi_inv * st.project_r(sum);
}

struct Attempt {
  bool ok = false;
  GenericResult result;
  std::string why;
};

Attempt iterate(const Setup& st, const SubspaceDecomposition& dec, double t, const FixedPointOptions& opt) {
  Attempt at;
  GenericResult& res = at.result;
  res.t = t;
  res.b = dec.b_star;
  RVec sc = s_star_coords(st, dec);
  double first = -1.0;
  for (int k = 0; k <= opt.max_iter; ++k) {
    RMat g;
    try {
      g = generic_log_product(res.b, st.s_from(sc), t, opt.log_branch_tol);
    } catch (const Error& e) {
      at.why = e.what();
      return at;
    }
    const double r = (g - st.b_star).norm();
    res.residuals.push_back(r);
    std::vector<const RMat*> snap;
    for (const auto& b : res.b) snap.push_back(&b);
    const RMat s_now = st.s_from(sc);
    snap.push_back(&s_now);
    res.log.push_back({{"k", k}, {"residual", r}, {"digest", coefficient_digest(snap)}});
    res.iterations = k;
    res.residual = r;
    res.s = s_now;
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
    const auto comps = st.project_b(g);
    for (std::size_t j = 0; j < res.b.size(); ++j) res.b[j] += dec.b_star[j] - comps[j];
    sc -= (1.0 / t) * (st.psi_inv * st.project_r(g));
  }
  at.why = "no convergence within max_iter";
  return at;
}

}  // namespace

RMat SubspaceDecomposition::b_star_sum() const {
  RMat s = RMat::Zero(size, size);
  for (const auto& b : b_star) s += b;
  return s;
}

void SubspaceDecomposition::validate() const {
  if (size < 1) throw Error(ErrorKind::dimension, "decomposition: size must be >= 1");
  if (b_star.size() != b_spaces.size())
    throw Error(ErrorKind::dimension, "decomposition: one b_* component per b space required");
  auto check_shape = [this](const RMat& m) {
    if (m.rows() != size || m.cols() != size) throw Error(ErrorKind::dimension, "decomposition: bad matrix shape");
  };
  std::vector<RVec> cols;
  for (const auto& space : b_spaces)
    for (const auto& m : space) {
      check_shape(m);
      cols.push_back(vec(m));
    }
  for (const auto& m : s_space) check_shape(m);
  for (const auto& m : b_star) check_shape(m);
  const Eigen::Index d2 = static_cast<Eigen::Index>(size) * size;
  RMat all(d2, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) all.col(k) = cols[k];
  if (orth(all, 1e-12).cols() != all.cols())
    throw Error(ErrorKind::rank_deficient, "decomposition: b spaces are not independent");
  RMat sm(d2, static_cast<Eigen::Index>(s_space.size()));
  for (std::size_t k = 0; k < s_space.size(); ++k) sm.col(k) = vec(s_space[k]);
  if (orth(sm, 1e-12).cols() != sm.cols())
    throw Error(ErrorKind::rank_deficient, "decomposition: s basis is not independent");
  for (std::size_t j = 0; j < b_spaces.size(); ++j) {
    RMat bj(d2, static_cast<Eigen::Index>(b_spaces[j].size()));
    for (std::size_t k = 0; k < b_spaces[j].size(); ++k) bj.col(k) = vec(b_spaces[j][k]);
    const RVec target = vec(b_star[j]);
    const RVec fit = bj.cols() ? RVec(bj * bj.completeOrthogonalDecomposition().solve(target)) : RVec::Zero(d2);
    if ((fit - target).norm() > 1e-12 * std::max(1.0, target.norm()))
      throw Error(ErrorKind::invalid_argument, "decomposition: b_* component outside its space");
  }
}

RMat generic_log_product(const std::vector<RMat>& b, const RMat& s, double t, double branch_tol) {
  const CMat sc = (t * s).cast<cdouble>();
  CMat p = expm(-sc);
  for (const auto& bj : b) p = p * expm((t * bj).cast<cdouble>());
  p = p * expm(sc);
  const CMat l = logm(p, branch_tol);
  if (l.imag().norm() > 1e-9 * std::max(1.0, l.real().norm()))
    throw Error(ErrorKind::log_branch, "logarithm of the product is not real");
  return l.real() / t;
}

std::string coefficient_digest(const std::vector<const RMat*>& mats) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const RMat* m : mats) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(m->data());
    const std::size_t len = static_cast<std::size_t>(m->size()) * sizeof(double);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double largest_convergent_t(const std::function<bool(double)>& converges, double t, int steps) {
  double lo = 0.0;
  double hi = t;
  for (int k = 0; k < steps; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (converges(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

GenericResult generic_fixed_point(const SubspaceDecomposition& dec, double t, const FixedPointOptions& opt) {
  const Setup st = make_setup(dec);
  if (t == 0.0) {
    GenericResult r;
    r.b = dec.b_star;
    r.s = st.s_from(s_star_coords(st, dec));
    return r;
  }
  Attempt at = iterate(st, dec, t, opt);
  if (at.ok) return std::move(at.result);
  double safe = 0.0;
  if (opt.bisect_on_divergence)
    safe = largest_convergent_t([&](double tt) { return iterate(st, dec, tt, opt).ok; }, t, opt.bisection_steps);
  char msg[160];
  std::snprintf(msg, sizeof(msg), "fixed point diverged at t=%.17g (%s); largest convergent t=%.17g", t,
                at.why.c_str(), safe);
  throw DivergenceError(msg, safe);
}

}  // namespace qs
