#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qs {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Scaling-and-squaring with Padé approximants of degree 3..13 chosen by the 1-norm.
CMat expm(const CMat& a);

// Principal logarithm by inverse scaling-and-squaring. Throws ErrorKind::log_branch
// when an eigenvalue lies within `branch_tol` of the closed negative real axis.
CMat logm(const CMat& a, double branch_tol = 1e-8);

struct PhiPair {
  CMat exp;   // e^z
  CMat phi1;  // (e^z - 1)/z
  CMat phi2;  // (e^z - 1 - z)/z^2
};

// Both functions from one exponential of the block matrix [[A, I, 0], [0, 0, I], [0, 0, 0]].
PhiPair phi_functions(const CMat& a);

// Distance from the spectrum of `a` to the closed negative real axis.
double branch_distance(const CMat& a);

double norm1(const CMat& a);

}  // namespace qs
