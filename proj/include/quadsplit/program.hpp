#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "quadsplit/symbol.hpp"

namespace qs {

enum class StepKind {
  translate,          // e^{alpha d_j}
  modulate,           // e^{i alpha x_j}
  fourier_quadratic,  // e^{-i a(D)}, a(xi) = xi^T a xi
  x_quadratic,        // e^{i x^T a x}
  shear,              // e^{alpha x_k d_j}:  u -> u(x + alpha x_k e_j)
  gaussian_x,         // e^{-x^T b x}
  gaussian_fourier,   // e^{-b(D)}
  scalar,             // e^{gamma}
};

const char* to_string(StepKind k);
StepKind step_kind_from_string(const std::string& s);

struct SplitStep {
  StepKind kind = StepKind::scalar;
  int j = 0;
  int k = 0;
  double alpha = 0.0;
  RMat a;  // a or b for the quadratic kinds
  cdouble gamma = 0.0;

  static SplitStep translate(int j, double alpha);
  static SplitStep modulate(int j, double alpha);
  static SplitStep fourier_quadratic(RMat a);
  static SplitStep x_quadratic(RMat a);
  static SplitStep shear(int j, int k, double alpha);
  static SplitStep gaussian_x(RMat b);
  static SplitStep gaussian_fourier(RMat b);
  static SplitStep scalar(cdouble gamma);

  // Symbol p with step operator = e^{-p^w}.
  QuadraticSymbol symbol(int n) const;
  void validate(int n) const;

  nlohmann::json to_json() const;
  static SplitStep from_json(const nlohmann::json& j);
};

// Steps are stored in execution order: steps[0] acts first.
struct SplittingProgram {
  int dim = 1;
  std::vector<SplitStep> steps;
  QuadraticSymbol target{1};
  double t = 0.0;
  // Set when the target is a flow that is not written as a symbol (e.g. transport u o G).
  std::optional<AffineFlow> target_flow;
  std::string provenance;
  // Closed-form count of fused FFT passes, -1 when not documented.
  int fft_passes = -1;
  nlohmann::json log;  // iteration log for iterative constructions

  AffineFlow target_affine_flow() const;
  // Phi(S_m) ... Phi(S_1).
  AffineFlow product_flow() const;

  nlohmann::json to_json() const;
  static SplittingProgram from_json(const nlohmann::json& j);
};

// Flow of the transport u -> u o G on R^n.
AffineFlow transport_flow(const RMat& g);

}  // namespace qs
