#pragma once

#include <json.hpp>
#include <vector>

#include "quadsplit/program.hpp"

namespace qs {

struct SplitReport {
  // Frobenius residuals of product flow minus target flow, by block (basis B).
  double linear_residual = 0.0;
  double shift_residual = 0.0;
  double column_residual = 0.0;
  double phase_residual = 0.0;
  // |product - target|_F / max(1, |target|_F) on the full (2n+2) matrix.
  double residual = 0.0;
  // Smallest eigenvalue of the Sp+ Hermitian form for each factor's homogenized flow, and whether
  // the factor's symbol has a nonnegative real part (so the margin is expected to be >= 0).
  std::vector<double> factor_margins;
  std::vector<bool> factor_dissipative;
  // Smallest eigenvalue of b for each Gaussian step, in step order.
  std::vector<double> gaussian_margins;
  int steps = 0;
  double tol = 1e-10;
  bool ok = false;

  // Smallest margin over dissipative factors (+inf if none).
  double min_dissipative_margin() const;
  nlohmann::json to_json() const;
};

SplitReport verify_program(const SplittingProgram& prog, double tol = 1e-10);

}  // namespace qs
