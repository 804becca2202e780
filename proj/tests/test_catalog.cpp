#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "quadsplit/catalog.hpp"
#include "quadsplit/errors.hpp"
#include "quadsplit/oracles.hpp"
#include "quadsplit/spectral.hpp"
#include "quadsplit/verify.hpp"

using namespace qs;

namespace {

const cdouble kI{0.0, 1.0};
using cplx = std::complex<double>;

// Matrix G with program = u -> u o G, for programs made of shears only.
RMat transport_matrix(const SplittingProgram& p) {
  RMat g = RMat::Identity(p.dim, p.dim);
  for (const auto& s : p.steps) {
    REQUIRE(s.kind == StepKind::shear);
    RMat e = RMat::Identity(p.dim, p.dim);
    e(s.j, s.k) = s.alpha;
    g = g * e;
  }
  return g;
}

RMat rot(double th) {
  RMat r(2, 2);
  r << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
  return r;
}

double fp_det(double t) {
  const double e = std::exp(t);
  return (8 * t * e * e - 8 * t - 16 * e * e + 32 * e - 16) / (16 * e * e);
}

double kfp_det(double t) { return std::sinh(2 * t) * (t - std::tanh(t)) / 8.0; }

}  // namespace

TEST_SUITE("catalog") {

TEST_CASE("harmonic oscillator coefficients") {
  const SplittingProgram z = harmonic_oscillator(0.0);
  for (const auto& s : z.steps) CHECK(s.a.norm() == 0.0);
  const SplittingProgram p = harmonic_oscillator(0.5);
  REQUIRE(p.steps.size() == 3);
  CHECK(p.steps[0].a(0, 0) == doctest::Approx(std::tanh(0.5) / 2).epsilon(1e-15));
  CHECK(p.steps[1].a(0, 0) == doctest::Approx(std::sinh(1.0) / 2).epsilon(1e-15));
  CHECK(p.steps[2].a(0, 0) == doctest::Approx(std::tanh(0.5) / 2).epsilon(1e-15));
  for (int n : {1, 2, 3}) {
    const SplitReport r = verify_program(harmonic_oscillator(0.3, n));
    CHECK(r.residual <= 1e-12);
    CHECK(r.min_dissipative_margin() >= -1e-12);
    CHECK(r.ok);
  }
  CHECK_THROWS_AS(harmonic_oscillator(-0.1), Error);
}

TEST_CASE("rotation2d") {
  CHECK((transport_matrix(rotation2d(0.0)) - RMat::Identity(2, 2)).norm() == 0.0);
  const SplittingProgram q = rotation2d(std::numbers::pi / 2);
  CHECK(q.steps[0].alpha == doctest::Approx(1.0));
  CHECK(q.steps[1].alpha == doctest::Approx(-1.0));
  CHECK(q.steps[2].alpha == doctest::Approx(1.0));
  for (double th : {-2.5, -1.0, 0.3, 1.2, 3.0}) {
    CHECK((transport_matrix(rotation2d(th)) - rot(th)).norm() <= 1e-14);
    CHECK(verify_program(rotation2d(th)).residual <= 1e-12);
  }
  try {
    rotation2d(3.1415);
    FAIL("expected singular parameter");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_parameter);
    CHECK(std::string(e.what()).find("near-singular angle") != std::string::npos);
  }
}

TEST_CASE("rotation2d composed k times equals one rotation") {
  const double th = 2.2;
  for (int k : {2, 3, 7}) {
    std::vector<AffineFlow> flows;
    for (int i = 0; i < k; ++i) flows.push_back(rotation2d(th / k).product_flow());
    CHECK(frobenius_distance(compose_affine(flows), rotation2d(th).product_flow()) <= 1e-11);
  }
}

TEST_CASE("dilatation coefficients and flow") {
  const SplittingProgram one = dilatation(1.0);
  for (const auto& s : one.steps) {
    if (s.kind == StepKind::scalar)
      CHECK(s.gamma == cdouble(0.0));
    else
      CHECK(s.a(0, 0) == 0.0);
  }
  const SplittingProgram two = dilatation(2.0);
  REQUIRE(two.steps.size() == 5);
  CHECK(two.steps[0].a(0, 0) == doctest::Approx(0.25));       // alpha
  CHECK(two.steps[1].a(0, 0) == doctest::Approx(-0.5));       // eps beta
  CHECK(two.steps[2].a(0, 0) == doctest::Approx(-0.5));       // -beta
  CHECK(two.steps[3].a(0, 0) == doctest::Approx(0.25));       // -eps alpha
  CHECK(std::abs(std::exp(two.steps[4].gamma) - 1.0 / std::sqrt(2.0)) < 1e-15);
  for (double l : {0.3, 0.9, 1.0, 1.7, 4.0}) CHECK(verify_program(dilatation(l)).residual <= 1e-12);
  CHECK_THROWS_AS(dilatation(0.0), Error);
  CHECK_THROWS_AS(dilatation(-1.0), Error);
}

TEST_CASE("reflection flow") {
  const SplittingProgram r = reflection1d();
  CHECK(verify_program(r).residual <= 1e-12);
  // The flow fixes the operator only up to sign; twice gives linear part I and phase -2 pi.
  const AffineFlow twice = compose_affine({r.product_flow(), r.product_flow()});
  CHECK((twice.linear.m - CMat::Identity(2, 2)).norm() <= 1e-12);
  CHECK(std::abs(twice.phase + 2 * std::numbers::pi) <= 1e-12);
}

TEST_CASE("reflection on the grid") {
  const Grid g = Grid::uniform(1, 256, -12, 12);
  const oracles::Field f = [](const std::vector<double>& x) {
    return cplx(std::exp(-0.5 * (x[0] - 1.2) * (x[0] - 1.2)), 0.3 * x[0] * std::exp(-x[0] * x[0]));
  };
  const StateField u = StateField::from_function(g, f);
  StateField v = u;
  execute(v, reflection1d());
  const StateField mirrored = StateField::from_function(g, [&](const std::vector<double>& x) { return f({-x[0]}); });
  CHECK(l2_error(v, mirrored) <= 1e-10);
  execute(v, reflection1d());
  CHECK(l2_error(v, u) <= 1e-10);
  const StateField odd = StateField::from_function(g, [](const std::vector<double>& x) { return cplx(x[0] * std::exp(-x[0] * x[0]), 0.0); });
  StateField w = odd;
  execute(w, reflection1d());
  for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] = -w.values[i];
  CHECK(l2_error(w, odd) <= 1e-10);
}

TEST_CASE("shear factorization") {
  CHECK(shear_factorize(RMat::Identity(3, 3)).steps.empty());
  RMat g(2, 2);
  g << 1, 1, 0, 1;
  const SplittingProgram one = shear_factorize(g);
  CHECK(one.steps.size() == 1);
  CHECK((transport_matrix(one) - g).norm() == 0.0);

  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    RMat m(3, 3);
    for (int i = 0; i < 9; ++i) m.data()[i] = n01(rng);
    if (m.determinant() < 0) m.row(0) *= -1.0;
    m /= std::cbrt(m.determinant());
    const SplittingProgram p = shear_factorize(m);
    CHECK(p.steps.size() <= 9);
    CHECK((transport_matrix(p) - m).norm() <= 1e-11 * std::max(1.0, m.norm()));
    CHECK(verify_program(p).residual <= 1e-10);
  }
  RMat swap(2, 2);
  swap << 0, 1, -1, 0;
  CHECK((transport_matrix(shear_factorize(swap)) - swap).norm() <= 1e-15);
  CHECK_THROWS_AS(shear_factorize(2.0 * RMat::Identity(2, 2)), Error);
  CHECK_THROWS_AS(shear_factorize(RMat::Zero(2, 2)), Error);
}

TEST_CASE("rotation_nd") {
  RMat j2(2, 2);
  j2 << 0, 1, -1, 0;
  const SplittingProgram z = rotation_nd(j2, 0.0);
  CHECK((transport_matrix(z) - RMat::Identity(2, 2)).norm() == 0.0);
  for (double t : {0.1, 0.4}) {
    const SplittingProgram p = rotation_nd(j2, t);
    CHECK((transport_matrix(p) - rot(t)).norm() <= 1e-12);
    CHECK(frobenius_distance(p.product_flow(), rotation2d(t).product_flow()) <= 1e-11);
  }
  RMat m(3, 3);
  m << 0, 0.5, -0.8, -0.5, 0, 0.3, 0.8, -0.3, 0;
  const SplittingProgram p = rotation_nd(m, 0.2);
  CHECK(p.steps.size() == 8);
  CHECK(p.fft_passes == 8);
  CHECK((transport_matrix(p) - (0.2 * m).exp()).norm() <= 1e-11);
  CHECK(verify_program(p).residual <= 1e-11);

  RMat bad = m;
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(rotation_nd(bad, 0.1), Error);
  RMat sparse = RMat::Zero(3, 3);
  sparse(0, 1) = 1;
  sparse(1, 0) = -1;
  CHECK_THROWS_AS(rotation_nd(sparse, 0.1), Error);
}

TEST_CASE("fokker planck") {
  const SplittingProgram z = fokker_planck(0.0);
  CHECK(fokker_planck_a(0.0).norm() == 0.0);
  CHECK(verify_program(z).residual == doctest::Approx(0.0));
  for (int i = 0; i <= 50; ++i) {
    const double t = 0.1 * i;
    const RMat a = fokker_planck_a(t);
    Eigen::SelfAdjointEigenSolver<RMat> es(a);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK(std::abs(a.determinant() - fp_det(t)) <= 1e-11 * std::max(1.0, std::abs(fp_det(t))));
  }
  for (double t : {0.05, 0.5, 1.0, 2.5}) CHECK(verify_program(fokker_planck(t)).residual <= 1e-10);
  const double s = 0.3, t = 0.7;
  const AffineFlow st = compose_affine({fokker_planck(t).product_flow(), fokker_planck(s).product_flow()});
  CHECK(frobenius_distance(st, fokker_planck(s + t).product_flow()) <= 1e-10 * frobenius_norm(st));
  CHECK_THROWS_AS(fokker_planck(-0.1), Error);
}

TEST_CASE("kramers fokker planck") {
  CHECK(kramers_fokker_planck_a(0.0).norm() == 0.0);
  for (double t : {0.2, 1.0, 3.0}) {
    CHECK(std::abs(kramers_fokker_planck_a(t).determinant() - kfp_det(t)) <= 1e-12 * std::max(1.0, kfp_det(t)));
    CHECK(verify_program(kramers_fokker_planck(t)).residual <= 1e-12);
  }
  CHECK_THROWS_AS(kramers_fokker_planck(-1.0), Error);
}

TEST_CASE("step counts") {
  CHECK(harmonic_oscillator(0.4).steps.size() == 3);
  CHECK(rotation2d(0.4).steps.size() == 3);
  const SplittingProgram d = dilatation(2.0);
  CHECK(d.steps.size() == 5);
  CHECK(d.steps.back().kind == StepKind::scalar);
  const SplittingProgram fp = fokker_planck(0.4);
  int shears = 0, gf = 0, chirps = 0, scalars = 0;
  for (const auto& s : fp.steps) {
    shears += s.kind == StepKind::shear;
    gf += s.kind == StepKind::gaussian_fourier;
    chirps += s.kind == StepKind::x_quadratic || s.kind == StepKind::fourier_quadratic;
    scalars += s.kind == StepKind::scalar;
  }
  CHECK(shears == 1);
  CHECK(gf == 1);
  CHECK(chirps == 4);
  CHECK(scalars == 1);
  CHECK(kramers_fokker_planck(0.4).steps.size() == 4);
}

TEST_CASE("affine linear splitting") {
  CVec x1 = CVec::Zero(4), xi1 = CVec::Zero(4), both(2);
  x1(0) = 1.0;
  xi1(2) = 1.0;
  const SplittingProgram m = affine_linear_split(QuadraticSymbol(2, CMat::Zero(4, 4), x1), 0.7);
  REQUIRE(m.steps.size() == 1);
  CHECK(m.steps[0].kind == StepKind::modulate);
  const SplittingProgram tr = affine_linear_split(QuadraticSymbol(2, CMat::Zero(4, 4), xi1), 0.7);
  REQUIRE(tr.steps.size() == 1);
  CHECK(tr.steps[0].kind == StepKind::translate);
  both << 1.0, 1.0;
  const SplittingProgram b = affine_linear_split(QuadraticSymbol(1, CMat::Zero(2, 2), both), 1.0);
  REQUIRE(b.steps.back().kind == StepKind::scalar);
  CHECK(std::abs(b.steps.back().gamma - 0.5 * kI) < 1e-15);
  CHECK(verify_program(b).residual <= 1e-13);
  CHECK(verify_program(m).residual <= 1e-13);
  CHECK(verify_program(tr).residual <= 1e-13);
  CHECK_THROWS_AS(affine_linear_split(QuadraticSymbol(1, CMat::Identity(2, 2)), 1.0), Error);
}

TEST_CASE("translate conjugation") {
  CVec y(2);
  y << 0.0, 0.0;
  const QuadraticSymbol centred(1, CMat::Identity(2, 2), y, 0.4);
  const TranslateConjugate c0 = translate_conjugate_split(centred);
  CHECK(c0.ell.Y().norm() == 0.0);
  CHECK(c0.c == doctest::Approx(0.4));

  CVec y1(2);
  y1 << -2.0, 0.0;
  CMat q1 = CMat::Zero(2, 2);
  q1(0, 0) = 1.0;
  const QuadraticSymbol shifted(1, q1, y1, 1.0);
  const TranslateConjugate c1 = translate_conjugate_split(shifted);
  CHECK(std::abs(c1.c) < 1e-14);
  CHECK(std::abs(c1.ell.Y()(0)) < 1e-15);
  CHECK(frobenius_distance(translate_conjugate_flow(c1), affine_flow(shifted, 1.0)) <= 1e-12);

  std::mt19937_64 rng(22);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    RMat a(4, 4);
    for (int i = 0; i < 16; ++i) a.data()[i] = g(rng) * 0.5;
    const RMat q = a * a.transpose();
    RVec w(4);
    for (int i = 0; i < 4; ++i) w(i) = g(rng);
    const QuadraticSymbol p(2, q.cast<cdouble>(), (q * w).cast<cdouble>(), g(rng));
    const AffineFlow target = affine_flow(p, 1.0);
    CHECK(frobenius_distance(translate_conjugate_flow(translate_conjugate_split(p)), target) <=
          1e-11 * std::max(1.0, frobenius_norm(target)));
  }
}

TEST_CASE("verify reports perturbations and Strang inexactness") {
  SplittingProgram p = harmonic_oscillator(0.3);
  p.steps[1].a(0, 0) += 1e-3;
  const SplitReport r = verify_program(p);
  CHECK_FALSE(r.ok);
  CHECK(r.residual > 2e-4);
  CHECK(r.residual < 5e-3);

  const double r1 = verify_program(oracles::strang_harmonic(0.1)).residual;
  const double r2 = verify_program(oracles::strang_harmonic(0.05)).residual;
  CHECK(r1 > 1e-5);
  CHECK(r1 / r2 == doctest::Approx(8.0).epsilon(0.15));
}

TEST_CASE("catalog programs verify over random parameters") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double t = 3.0 * u(rng);
    CHECK(verify_program(harmonic_oscillator(t, 1 + trial % 3)).ok);
    CHECK(verify_program(rotation2d((2 * u(rng) - 1) * 3.0)).ok);
    CHECK(verify_program(dilatation(0.1 + 5 * u(rng))).ok);
    CHECK(verify_program(fokker_planck(t)).ok);
    CHECK(verify_program(kramers_fokker_planck(t)).ok);
  }
}

TEST_CASE("program json round trip is bit-faithful") {
  RMat m(3, 3);
  m << 0, 0.5, -0.8, -0.5, 0, 0.3, 0.8, -0.3, 0;
  for (const SplittingProgram& p : {fokker_planck(0.37), rotation_nd(m, 0.2), shear_factorize(RMat::Identity(2, 2)),
                                    dilatation(1.3)}) {
    const SplittingProgram r = SplittingProgram::from_json(nlohmann::json::parse(p.to_json().dump()));
    REQUIRE(r.steps.size() == p.steps.size());
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      CHECK(r.steps[i].kind == p.steps[i].kind);
      CHECK(r.steps[i].alpha == p.steps[i].alpha);
      CHECK(r.steps[i].gamma == p.steps[i].gamma);
      CHECK(r.steps[i].a == p.steps[i].a);
    }
    CHECK(frobenius_distance(r.target_affine_flow(), p.target_affine_flow()) == 0.0);
  }
}

}
