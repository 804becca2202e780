#include "quadsplit/verify.hpp"

#include <Eigen/Eigenvalues>
#include <limits>

namespace qs {

double SplitReport::min_dissipative_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < factor_margins.size(); ++k)
    if (factor_dissipative[k]) m = std::min(m, factor_margins[k]);
  return m;
}

nlohmann::json SplitReport::to_json() const {
  nlohmann::json o{{"residual", residual},
                   {"linear_residual", linear_residual},
                   {"shift_residual", shift_residual},
                   {"column_residual", column_residual},
                   {"phase_residual", phase_residual},
                   {"steps", steps},
                   {"tol", tol},
                   {"ok", ok},
                   {"gaussian_margins", gaussian_margins}};
  nlohmann::json f = nlohmann::json::array();
  for (std::size_t k = 0; k < factor_margins.size(); ++k)
    f.push_back({{"margin", factor_margins[k]}, {"dissipative", static_cast<bool>(factor_dissipative[k])}});
  o["factors"] = f;
  const double m = min_dissipative_margin();
  o["min_dissipative_margin"] = std::isfinite(m) ? nlohmann::json(m) : nlohmann::json(nullptr);
  return o;
}

namespace {

bool real_part_psd(const QuadraticSymbol& h) {
  const RMat re = h.Q().real();
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (re + re.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-12;
}

}  // namespace

SplitReport verify_program(const SplittingProgram& prog, double tol) {
  SplitReport rep;
  rep.tol = tol;
  rep.steps = static_cast<int>(prog.steps.size());
  const AffineFlow target = prog.target_affine_flow();
  const AffineFlow product = prog.product_flow();
  rep.linear_residual = (product.linear.m - target.linear.m).norm();
  rep.shift_residual = (product.shift - target.shift).norm();
  rep.column_residual = (product.column - target.column).norm();
  rep.phase_residual = std::abs(product.phase - target.phase);
  rep.residual = frobenius_distance(product, target) / std::max(1.0, frobenius_norm(target));
  for (const auto& s : prog.steps) {
    const QuadraticSymbol h = homogenize(s.symbol(prog.dim));
    const SpPlusCheck chk = is_nonneg_symplectic(hamiltonian_flow(h, 1.0), tol);
    rep.factor_margins.push_back(chk.margin);
    rep.factor_dissipative.push_back(real_part_psd(h));
    if (s.kind == StepKind::gaussian_x || s.kind == StepKind::gaussian_fourier) {
      Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (s.a + s.a.transpose()), Eigen::EigenvaluesOnly);
      rep.gaussian_margins.push_back(es.eigenvalues().minCoeff());
    }
  }
  rep.ok = rep.residual <= tol;
  return rep;
}

}  // namespace qs
