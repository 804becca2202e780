#pragma once

#include <json.hpp>
#include <optional>
#include <vector>

#include "quadsplit/matrix_functions.hpp"

namespace qs {

// p(X) = X^T Q X + Y^T X + c with X = (x_1..x_n, xi_1..xi_n).
class QuadraticSymbol {
 public:
  explicit QuadraticSymbol(int n);
  // Q is symmetrized; asymmetry above 1e-13 (relative to max(1, |Q|)) is rejected.
  QuadraticSymbol(int n, CMat q, CVec y = CVec(), cdouble c = 0.0);

  int dim() const { return n_; }
  const CMat& Q() const { return q_; }
  const CVec& Y() const { return y_; }
  cdouble c() const { return c_; }

  cdouble operator()(const CVec& x) const;
  QuadraticSymbol quadratic_part() const { return QuadraticSymbol(n_, q_); }

  QuadraticSymbol operator+(const QuadraticSymbol& o) const;
  QuadraticSymbol operator-(const QuadraticSymbol& o) const;
  QuadraticSymbol operator*(cdouble s) const;

  nlohmann::json to_json() const;
  static QuadraticSymbol from_json(const nlohmann::json& j);

 private:
  int n_;
  CMat q_;
  CVec y_;
  cdouble c_;
};

CMat symplectic_j(int n);

struct FlowMatrix {
  int n = 0;
  CMat m;

  double symplectic_residual() const;
};

// Blocks of the (2n+2)-flow of P p in the basis B = (X, x_{n+1}, xi_{n+1}):
//   [[linear, column, 0], [0, 1, 0], [shift, phase, 1]].
// `column` is determined by the others (column = -J linear^{-T} shift^T) but is kept
// so that products need no inverse.
struct AffineFlow {
  FlowMatrix linear;
  Eigen::RowVectorXcd shift;
  CVec column;
  cdouble phase = 0.0;

  static AffineFlow identity(int n);
  int dim() const { return linear.n; }
};

QuadraticSymbol poisson_bracket(const QuadraticSymbol& p1, const QuadraticSymbol& p2);

// e^{-2itJQ}; Y and c are ignored.
FlowMatrix hamiltonian_flow(const QuadraticSymbol& q, double t);

// P p on C^{2n+2}. Storage order is (x_1..x_{n+1}, xi_1..xi_{n+1}); with `basis_b`
// the coordinates are permuted to (X, x_{n+1}, xi_{n+1}).
QuadraticSymbol homogenize(const QuadraticSymbol& p, bool basis_b = false);

// Permutation sending storage index of the homogenized space to its basis-B index.
std::vector<int> basis_b_permutation(int n);

AffineFlow affine_flow(const QuadraticSymbol& p, double t);

struct KappaSeries {
  cdouble value;
  int terms = 0;
  bool converged = false;
};

// kappa = sum_k 4^k t^{2k+3} / (2k+3)! q((JQ)^k J L^T), q the quadratic form of Q, L = Y^T.
// The phase block of the time-t flow is 2i (kappa + t c). `converged` is false when the
// terms stop decreasing or cancel beyond double precision.
KappaSeries kappa_series(const QuadraticSymbol& p, double t, int max_terms = 400);

// Same blocks as affine_flow, with the phase assembled from kappa_series.
AffineFlow affine_flow_series(const QuadraticSymbol& p, double t);

// flows[0] * flows[1] * ... as block arithmetic.
AffineFlow compose_affine(const std::vector<AffineFlow>& flows);

// (2n+2)x(2n+2) matrix in basis B.
CMat to_dense(const AffineFlow& f);
AffineFlow from_dense(const CMat& m);

// Direct exponential of the homogenized Hamiltonian matrix, permuted to basis B.
CMat dense_affine_flow(const QuadraticSymbol& p, double t);

double frobenius_distance(const AffineFlow& a, const AffineFlow& b);
double frobenius_norm(const AffineFlow& a);

struct SpPlusCheck {
  bool ok = false;
  double symplectic_residual = 0.0;
  double margin = 0.0;  // smallest eigenvalue of conj(T)^T (-iJ) T - (-iJ)
};

SpPlusCheck is_nonneg_symplectic(const FlowMatrix& t, double tol);

struct LowerBoundDecomposition {
  QuadraticSymbol q;
  RVec y;
  double c;
};

// p(X) = q(X - y) + c for real p bounded below.
LowerBoundDecomposition lower_bound_decompose(const QuadraticSymbol& p, double tol = 1e-10);

bool is_real(const QuadraticSymbol& p, double tol = 1e-14);

}  // namespace qs
