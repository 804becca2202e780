#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "quadsplit/program.hpp"
#include "quadsplit/spectral.hpp"

namespace qs::oracles {

constexpr std::size_t kMaxDenseUnknowns = 4096;

// Spectral-collocation matrix of p^w on a 1-D or 2-D periodic grid.
struct DenseOperator {
  Grid grid;
  CMat matrix;
};

// x_j is diagonal, D_j = F^{-1} diag(xi) F with the Nyquist mode dropped. Products are
// Weyl-symmetrized: Q_ab (Z_a Z_b + Z_b Z_a) / 2.
DenseOperator discretize_weyl(const QuadraticSymbol& p, const Grid& grid);

// Smallest eigenvalue of (op + op^*)/2.
double hermitian_floor(const DenseOperator& op);

// e^{-t op}. Throws when t times the growth bound would overflow.
CMat dense_semigroup(const DenseOperator& op, double t);

// e^{-t op} v by substepped Taylor series; for grids where the dense exponential is slow.
CVec dense_semigroup_apply(const DenseOperator& op, double t, const CVec& v);

CVec to_vector(const StateField& f);
StateField from_vector(const Grid& g, const CVec& v);

using Field = std::function<std::complex<double>(const std::vector<double>&)>;

// e^{-|x|^2/2}, an eigenfunction of |x|^2 - Lap with eigenvalue n.
Field ground_state();
// e^{-nt} e^{-|x|^2/2}.
Field ground_state_decay(int n, double t);
// u0(e^{tB} x): the solution of d_t u = Bx.grad u by characteristics.
Field transport(const Field& u0, const RMat& b, double t);
// u0(lambda x).
Field dilated(const Field& u0, double lambda);
// e^{-v^2/2} on (x, v), constant in x.
Field maxwellian();
// e^{-t} e^{-v^2/2}: the Kramers-Fokker-Planck decay of the Maxwellian.
Field kfp_decay(double t);
// 1-D harmonic oscillator from e^{-(x - x0)^2/2}: e^{-x^2/2 + b x + g} with
// b = x0 e^{-2t}, g = -x0^2/2 + x0^2 (1 - e^{-4t})/4 - t.
Field harmonic_gaussian(double x0, double t);

// Strang baseline for e^{-t(|x|^2 - Lap)}: e^{-t|x|^2/2} e^{t Lap} e^{-t|x|^2/2}.
SplittingProgram strang_harmonic(double t, int n = 1);

}  // namespace qs::oracles
