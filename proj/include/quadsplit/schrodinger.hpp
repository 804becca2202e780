#pragma once

#include <json.hpp>
#include <vector>

#include "quadsplit/generic.hpp"
#include "quadsplit/program.hpp"

namespace qs {

// Coefficients of the exact splitting of i du/dt = -1/2 Lap u + v(x) u - i Bx.grad u,
// target symbol i(|xi|^2/2 + x^T V x + Bx.xi).
struct SchrodingerCoefficients {
  RMat V_ell;  // diagonal
  RMat U;      // strictly upper
  RMat A;      // symmetric
  RMat L;      // strictly lower
  RMat V_r;    // symmetric
  double t = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residuals;
  nlohmann::json log = nlohmann::json::array();
};

SchrodingerCoefficients schrodinger_coefficients(const RMat& V, const RMat& B, double t,
                                                 const FixedPointOptions& opt = {});

QuadraticSymbol schrodinger_symbol(const RMat& V, const RMat& B);

// Execution order: x_quadratic(-t V_r), shears from L (rows n-1..1), fourier_quadratic(t A),
// shears from U (rows n-2..0), x_quadratic(-t V_ell).
SplittingProgram schrodinger_program(const SchrodingerCoefficients& c, const RMat& V, const RMat& B);

}  // namespace qs
