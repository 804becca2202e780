#include <doctest.h>

#include <cmath>

#include "quadsplit/errors.hpp"
#include "quadsplit/generic.hpp"
#include "quadsplit/schrodinger.hpp"
#include "quadsplit/verify.hpp"

using namespace qs;

namespace {

RMat e2(int r, int c) {
  RMat m = RMat::Zero(2, 2);
  m(r, c) = 1.0;
  return m;
}

RMat rotation_generator() {
  RMat b(2, 2);
  b << 0, 1, -1, 0;
  return b;
}

// b_1 = lower, b_2 = upper, s = lower; b_* = [[0, 1], [-1, 0]].
SubspaceDecomposition sl2(bool diagonal_s = false) {
  SubspaceDecomposition d;
  d.size = 2;
  d.b_spaces = {{e2(1, 0)}, {e2(0, 1)}};
  d.b_star = {-e2(1, 0), e2(0, 1)};
  if (diagonal_s) {
    RMat h = RMat::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    d.s_space = {h};
  } else {
    d.s_space = {e2(1, 0)};
  }
  return d;
}

}  // namespace

TEST_SUITE("generic") {

TEST_CASE("sl2 fixed point converges and re-evaluates") {
  const SubspaceDecomposition d = sl2();
  const GenericResult r = generic_fixed_point(d, 0.1);
  CHECK(r.residual <= 1e-13);
  const RMat g = generic_log_product(r.b, r.s, 0.1);
  CHECK((g - d.b_star_sum()).norm() <= 1e-13);
  CHECK((g - d.b_star_sum()).norm() == doctest::Approx(r.residual).epsilon(0.5).scale(1e-13));
  // Each b_j stays in its space.
  CHECK(r.b[0](0, 1) == 0.0);
  CHECK(r.b[1](1, 0) == 0.0);
  REQUIRE(r.residuals.size() >= 4);
  for (std::size_t k = 3; k < r.residuals.size(); ++k)
    if (r.residuals[k - 1] > 1e-13) CHECK(r.residuals[k] / r.residuals[k - 1] <= 0.55);
  CHECK(r.log.size() == r.residuals.size());
  CHECK(r.log[0].at("digest").get<std::string>().size() == 16);
}

TEST_CASE("t = 0 returns b_* and s_*") {
  const SubspaceDecomposition d = sl2();
  const GenericResult r = generic_fixed_point(d, 0.0);
  CHECK((r.b[0] - d.b_star[0]).norm() == 0.0);
  CHECK((r.b[1] - d.b_star[1]).norm() == 0.0);
  // [b_1*, b_2*] = [-E21, E12] = diag(1, -1) lies in the complement; s_* = -1/2 Psi^{-1} of it.
  // ad_{b_*}(E21) = [b_*, E21] = diag(1, -1), so s_* = -1/2 E21.
  CHECK((r.s - (-0.5) * e2(1, 0)).norm() <= 1e-14);
}

TEST_CASE("diagonal s is rejected") {
  try {
    generic_fixed_point(sl2(true), 0.1);
    FAIL("expected rank deficiency");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::rank_deficient);
    CHECK(std::string(e.what()).find("Psi not invertible") != std::string::npos);
  }
}

TEST_CASE("commuting spaces converge immediately") {
  SubspaceDecomposition d;
  d.size = 2;
  d.b_spaces = {{e2(0, 0)}, {e2(1, 1)}};
  d.b_star = {0.7 * e2(0, 0), -0.4 * e2(1, 1)};
  const GenericResult r = generic_fixed_point(d, 0.5);
  CHECK(r.iterations <= 1);
  CHECK(r.residual <= 1e-13);
}

TEST_CASE("invalid decompositions") {
  SubspaceDecomposition d = sl2();
  d.b_star[0] = e2(0, 1);
  CHECK_THROWS_AS(generic_fixed_point(d, 0.1), Error);
  SubspaceDecomposition dup = sl2();
  dup.b_spaces[1] = {e2(1, 0)};
  CHECK_THROWS_AS(generic_fixed_point(dup, 0.1), Error);
}

TEST_CASE("divergence reports a safe step") {
  FixedPointOptions opt;
  opt.bisection_steps = 8;
  try {
    generic_fixed_point(sl2(), 4.0, opt);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.safe_t() > 0.0);
    CHECK(e.safe_t() < 4.0);
    CHECK_NOTHROW(generic_fixed_point(sl2(), e.safe_t()));
  }
}

TEST_CASE("digest is stable and sensitive") {
  RMat a = RMat::Identity(2, 2), b = RMat::Identity(2, 2);
  CHECK(coefficient_digest({&a}) == coefficient_digest({&b}));
  b(0, 1) = 1e-300;
  CHECK(coefficient_digest({&a}) != coefficient_digest({&b}));
}

TEST_CASE("schrodinger t = 0") {
  RMat V(2, 2);
  V << 1.0, 0.2, 0.2, 2.0;
  const SchrodingerCoefficients c = schrodinger_coefficients(V, rotation_generator(), 0.0);
  CHECK((c.A - 0.5 * RMat::Identity(2, 2)).norm() == 0.0);
  CHECK((c.L + c.U - rotation_generator()).norm() == 0.0);
  CHECK((c.V_r - V).norm() == 0.0);
  CHECK(c.V_ell.norm() == 0.0);
}

TEST_CASE("schrodinger n = 1 matches the rotation closed form") {
  const RMat V = RMat::Constant(1, 1, 0.5), B = RMat::Zero(1, 1);
  for (double t : {0.1, 0.5, 1.0}) {
    const SchrodingerCoefficients c = schrodinger_coefficients(V, B, t);
    const double vr = std::tan(t / 2) / (2 * t);
    const double a = std::sin(t) / (2 * t);
    CHECK(c.V_r(0, 0) == doctest::Approx(vr).epsilon(1e-12));
    CHECK(c.V_ell(0, 0) == doctest::Approx(vr).epsilon(1e-12));
    CHECK(c.A(0, 0) == doctest::Approx(a).epsilon(1e-12));
    CHECK(verify_program(schrodinger_program(c, V, B)).residual <= 1e-12);
  }
}

TEST_CASE("schrodinger n = 2 with magnetic term") {
  const RMat V = RMat::Identity(2, 2), B = rotation_generator();
  const SchrodingerCoefficients c = schrodinger_coefficients(V, B, 0.1);
  CHECK(c.iterations <= 60);
  CHECK(c.residual <= 1e-13);
  // Structural zeros are exact.
  CHECK(c.U(1, 0) == 0.0);
  CHECK(c.U(0, 0) == 0.0);
  CHECK(c.L(0, 1) == 0.0);
  CHECK(c.L(1, 1) == 0.0);
  CHECK(c.V_ell(0, 1) == 0.0);
  CHECK(c.V_ell(1, 0) == 0.0);
  const SplittingProgram p = schrodinger_program(c, V, B);
  CHECK(p.fft_passes == 4);
  const SplitReport r = verify_program(p);
  CHECK(r.residual <= 1e-12);
  for (std::size_t i = 0; i < r.factor_margins.size(); ++i)
    if (r.factor_dissipative[i]) CHECK(r.factor_margins[i] >= -1e-12);
}

TEST_CASE("schrodinger coefficients at -t invert the product") {
  RMat V(3, 3);
  V << 1.0, 0.1, 0.0, 0.1, 0.5, 0.2, 0.0, 0.2, 0.8;
  RMat B(3, 3);
  B << 0, 0.3, -0.2, -0.3, 0, 0.4, 0.2, -0.4, 0;
  const double t = 0.15;
  const SplittingProgram fwd = schrodinger_program(schrodinger_coefficients(V, B, t), V, B);
  const SplittingProgram bwd = schrodinger_program(schrodinger_coefficients(V, B, -t), V, B);
  const AffineFlow prod = compose_affine({bwd.product_flow(), fwd.product_flow()});
  CHECK(frobenius_distance(prod, AffineFlow::identity(3)) <= 1e-10);
  CHECK(verify_program(fwd).residual <= 1e-12);
}

TEST_CASE("schrodinger input validation and divergence") {
  RMat V = RMat::Identity(2, 2);
  RMat notskew = rotation_generator();
  notskew(0, 1) = 2.0;
  CHECK_THROWS_AS(schrodinger_coefficients(V, notskew, 0.1), Error);
  V(0, 1) = 1.0;
  CHECK_THROWS_AS(schrodinger_coefficients(V, rotation_generator(), 0.1), Error);
  FixedPointOptions opt;
  opt.bisection_steps = 6;
  try {
    schrodinger_coefficients(RMat::Identity(2, 2), rotation_generator(), 6.0, opt);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.safe_t() < 6.0);
  }
}

}
