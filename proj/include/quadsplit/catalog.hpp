#pragma once

#include "quadsplit/generic.hpp"
#include "quadsplit/program.hpp"

namespace qs {

// e^{-t(|x|^2 - Lap)} in n dims.
SplittingProgram harmonic_oscillator(double t, int n = 1);

// u -> u o R_theta, R_theta = [[cos, sin], [-sin, cos]]. Refuses |theta| >= pi - margin.
SplittingProgram rotation2d(double theta, double margin = 1e-3);

// u -> u(lambda x).
SplittingProgram dilatation(double lambda);

// u -> u(-x); experimental.
SplittingProgram reflection1d();

// u -> u o G for det G = 1, by elimination with transvections only.
SplittingProgram shear_factorize(const RMat& g);

// e^{t Mx.grad}, M with zero diagonal and a column i whose off-diagonal entries are nonzero.
SplittingProgram rotation_nd(const RMat& m, double t, const FixedPointOptions& opt = {});

// Kinetic Fokker-Planck d_t u + v d_x u = d_v(d_v u + v u) on (x, v).
SplittingProgram fokker_planck(double t);
RMat fokker_planck_a(double t);

// Kramers-Fokker-Planck d_t u + v d_x u = -(v^2 - d_v^2) u on (x, v).
SplittingProgram kramers_fokker_planck(double t);
RMat kramers_fokker_planck_a(double t);

// e^{i t l^w} for a real linear symbol l.
SplittingProgram affine_linear_split(const QuadraticSymbol& ell, double t);

struct TranslateConjugate {
  double c = 0.0;
  QuadraticSymbol ell{1};  // real linear form -(J y)^T X
  QuadraticSymbol q{1};    // quadratic part of p
  RVec y;
};

// e^{-p^w} = e^{-c} e^{-i l^w} e^{-q^w} e^{i l^w} for real p bounded below.
TranslateConjugate translate_conjugate_split(const QuadraticSymbol& p);

// Flow of the right-hand side above; equals affine_flow(p, 1) when the split is exact.
AffineFlow translate_conjugate_flow(const TranslateConjugate& s);

}  // namespace qs
