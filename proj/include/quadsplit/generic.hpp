#pragma once

#include <functional>
#include <json.hpp>
#include <vector>

#include "quadsplit/matrix_functions.hpp"

namespace qs {

// Decomposition data for the fixed point
//   e^{-ts} e^{t b_1} ... e^{t b_m} e^{ts} = e^{t b_*},  b_j in b_spaces[j], s in s_space.
struct SubspaceDecomposition {
  int size = 0;                              // matrices are size x size
  std::vector<std::vector<RMat>> b_spaces;   // bases of b_1..b_m
  std::vector<RMat> s_space;                 // basis of s (may be empty)
  std::vector<RMat> b_star;                  // components b_{*,j} in b_j

  RMat b_star_sum() const;
  void validate() const;
};

struct GenericResult {
  std::vector<RMat> b;
  RMat s;
  double t = 0.0;
  int iterations = 0;
  double residual = 0.0;              // |g - b_*|_F at the returned point
  std::vector<double> residuals;      // one entry per evaluated iterate
  nlohmann::json log = nlohmann::json::array();
};

struct FixedPointOptions {
  double tol = 1e-13;
  int max_iter = 100;
  double log_branch_tol = 1e-6;
  bool bisect_on_divergence = true;
  int bisection_steps = 20;
};

// Throws Error(rank_deficient) when Psi is not invertible and DivergenceError (carrying the
// largest convergent t found by bisection) when the iteration does not converge.
GenericResult generic_fixed_point(const SubspaceDecomposition& dec, double t,
                                  const FixedPointOptions& opt = {});

// t^{-1} log(e^{-ts} e^{t b_1} ... e^{t b_m} e^{ts}).
RMat generic_log_product(const std::vector<RMat>& b, const RMat& s, double t, double branch_tol = 1e-6);

// 64-bit FNV-1a over the raw bytes of the given matrices, as 16 hex digits.
std::string coefficient_digest(const std::vector<const RMat*>& mats);

// Bisection on (0, t] for the largest t at which `converges` returns true.
double largest_convergent_t(const std::function<bool(double)>& converges, double t, int steps);

}  // namespace qs
