#include "quadsplit/program.hpp"

#include <array>
#include <Eigen/Eigenvalues>
#include <utility>

#include "quadsplit/errors.hpp"

namespace qs {

namespace {

constexpr cdouble kI{0.0, 1.0};

constexpr std::array<std::pair<StepKind, const char*>, 8> kNames{{
    {StepKind::translate, "translate"},
    {StepKind::modulate, "modulate"},
    {StepKind::fourier_quadratic, "fourier_quadratic"},
    {StepKind::x_quadratic, "x_quadratic"},
    {StepKind::shear, "shear"},
    {StepKind::gaussian_x, "gaussian_x"},
    {StepKind::gaussian_fourier, "gaussian_fourier"},
    {StepKind::scalar, "scalar"},
}};

bool has_matrix(StepKind k) {
  return k == StepKind::fourier_quadratic || k == StepKind::x_quadratic ||
         k == StepKind::gaussian_x || k == StepKind::gaussian_fourier;
}

nlohmann::json flat(const RMat& m) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

RMat unflat(const nlohmann::json& a, Eigen::Index rows, Eigen::Index cols) {
  if (a.size() != static_cast<std::size_t>(rows * cols))
    throw Error(ErrorKind::config, "matrix record has the wrong size");
  RMat m(rows, cols);
  for (Eigen::Index k = 0; k < rows * cols; ++k) m(k / cols, k % cols) = a[k].get<double>();
  return m;
}

int square_side(std::size_t count) {
  int s = 0;
  while (static_cast<std::size_t>(s * s) < count) ++s;
  if (static_cast<std::size_t>(s * s) != count) throw Error(ErrorKind::config, "matrix record is not square");
  return s;
}

}  // namespace

const char* to_string(StepKind k) {
  for (const auto& [kind, name] : kNames)
    if (kind == k) return name;
  return "unknown";
}

StepKind step_kind_from_string(const std::string& s) {
  for (const auto& [kind, name] : kNames)
    if (s == name) return kind;
  throw Error(ErrorKind::config, "unknown step kind: " + s);
}

SplitStep SplitStep::translate(int j, double alpha) {
  SplitStep s;
  s.kind = StepKind::translate;
  s.j = j;
  s.alpha = alpha;
  return s;
}

SplitStep SplitStep::modulate(int j, double alpha) {
  SplitStep s;
  s.kind = StepKind::modulate;
  s.j = j;
  s.alpha = alpha;
  return s;
}

SplitStep SplitStep::fourier_quadratic(RMat a) {
  SplitStep s;
  s.kind = StepKind::fourier_quadratic;
  s.a = std::move(a);
  return s;
}

SplitStep SplitStep::x_quadratic(RMat a) {
  SplitStep s;
  s.kind = StepKind::x_quadratic;
  s.a = std::move(a);
  return s;
}

SplitStep SplitStep::shear(int j, int k, double alpha) {
  SplitStep s;
  s.kind = StepKind::shear;
  s.j = j;
  s.k = k;
  s.alpha = alpha;
  return s;
}

SplitStep SplitStep::gaussian_x(RMat b) {
  SplitStep s;
  s.kind = StepKind::gaussian_x;
  s.a = std::move(b);
  return s;
}

SplitStep SplitStep::gaussian_fourier(RMat b) {
  SplitStep s;
  s.kind = StepKind::gaussian_fourier;
  s.a = std::move(b);
  return s;
}

SplitStep SplitStep::scalar(cdouble gamma) {
  SplitStep s;
  s.kind = StepKind::scalar;
  s.gamma = gamma;
  return s;
}

void SplitStep::validate(int n) const {
  auto index_ok = [n](int i) { return i >= 0 && i < n; };
  switch (kind) {
    case StepKind::translate:
    case StepKind::modulate:
      if (!index_ok(j)) throw Error(ErrorKind::dimension, "step index out of range");
      break;
    case StepKind::shear:
      if (!index_ok(j) || !index_ok(k)) throw Error(ErrorKind::dimension, "shear index out of range");
      if (j == k) throw Error(ErrorKind::invalid_argument, "shear needs j != k");
      break;
    case StepKind::scalar:
      break;
    default: {
      if (a.rows() != n || a.cols() != n) throw Error(ErrorKind::dimension, "step matrix must be n x n");
      if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-13 * std::max(1.0, a.cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::invalid_argument, "step matrix must be symmetric");
      if (kind == StepKind::gaussian_x || kind == StepKind::gaussian_fourier) {
        Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-12)
          throw Error(ErrorKind::invalid_argument, "gaussian step needs a positive semidefinite matrix");
      }
    }
  }
}

QuadraticSymbol SplitStep::symbol(int n) const {
  validate(n);
  CMat q = CMat::Zero(2 * n, 2 * n);
  CVec y = CVec::Zero(2 * n);
  cdouble c = 0.0;
  const RMat sym = has_matrix(kind) ? RMat(0.5 * (a + a.transpose())) : RMat();
  switch (kind) {
    case StepKind::translate:
      y(n + j) = -kI * alpha;
      break;
    case StepKind::modulate:
      y(j) = -kI * alpha;
      break;
    case StepKind::fourier_quadratic:
      q.bottomRightCorner(n, n) = kI * sym.cast<cdouble>();
      break;
    case StepKind::x_quadratic:
      q.topLeftCorner(n, n) = -kI * sym.cast<cdouble>();
      break;
    case StepKind::shear:
      q(k, n + j) = q(n + j, k) = -0.5 * kI * alpha;
      break;
    case StepKind::gaussian_x:
      q.topLeftCorner(n, n) = sym.cast<cdouble>();
      break;
    case StepKind::gaussian_fourier:
      q.bottomRightCorner(n, n) = sym.cast<cdouble>();
      break;
    case StepKind::scalar:
      c = -gamma;
      break;
  }
  return QuadraticSymbol(n, std::move(q), std::move(y), c);
}

nlohmann::json SplitStep::to_json() const {
  nlohmann::json o{{"kind", to_string(kind)}};
  switch (kind) {
    case StepKind::translate:
    case StepKind::modulate:
      o["j"] = j;
      o["alpha"] = alpha;
      break;
    case StepKind::shear:
      o["j"] = j;
      o["k"] = k;
      o["alpha"] = alpha;
      break;
    case StepKind::scalar:
      o["gamma_re"] = gamma.real();
      o["gamma_im"] = gamma.imag();
      break;
    default:
      o["a"] = flat(a);
  }
  return o;
}

SplitStep SplitStep::from_json(const nlohmann::json& o) {
  SplitStep s;
  s.kind = step_kind_from_string(o.at("kind").get<std::string>());
  s.j = o.value("j", 0);
  s.k = o.value("k", 0);
  s.alpha = o.value("alpha", 0.0);
  s.gamma = cdouble(o.value("gamma_re", 0.0), o.value("gamma_im", 0.0));
  if (has_matrix(s.kind)) {
    const int side = square_side(o.at("a").size());
    s.a = unflat(o.at("a"), side, side);
  }
  return s;
}

AffineFlow SplittingProgram::target_affine_flow() const {
  if (target_flow) return *target_flow;
  return affine_flow(target, t);
}

AffineFlow SplittingProgram::product_flow() const {
  if (steps.empty()) return AffineFlow::identity(dim);
  std::vector<AffineFlow> flows;
  flows.reserve(steps.size());
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) flows.push_back(affine_flow(it->symbol(dim), 1.0));
  return compose_affine(flows);
}

nlohmann::json SplittingProgram::to_json() const {
  nlohmann::json o;
  o["dim"] = dim;
  o["t"] = t;
  o["provenance"] = provenance;
  o["fft_passes"] = fft_passes;
  o["target"] = target.to_json();
  if (target_flow) {
    const CMat d = to_dense(*target_flow);
    o["target_flow"] = {{"re", flat(d.real())}, {"im", flat(d.imag())}};
  }
  o["steps"] = nlohmann::json::array();
  for (const auto& s : steps) o["steps"].push_back(s.to_json());
  if (!log.is_null()) o["log"] = log;
  return o;
}

SplittingProgram SplittingProgram::from_json(const nlohmann::json& o) {
  SplittingProgram p;
  p.dim = o.at("dim").get<int>();
  if (p.dim < 1) throw Error(ErrorKind::config, "program dim must be >= 1");
  p.t = o.value("t", 0.0);
  p.provenance = o.value("provenance", std::string());
  p.fft_passes = o.value("fft_passes", -1);
  p.target = o.contains("target") ? QuadraticSymbol::from_json(o.at("target")) : QuadraticSymbol(p.dim);
  if (p.target.dim() != p.dim) throw Error(ErrorKind::config, "target dimension does not match program");
  if (o.contains("target_flow")) {
    const int side = 2 * p.dim + 2;
    const RMat re = unflat(o.at("target_flow").at("re"), side, side);
    const RMat im = unflat(o.at("target_flow").at("im"), side, side);
    CMat d(side, side);
    d.real() = re;
    d.imag() = im;
    p.target_flow = from_dense(d);
  }
  for (const auto& s : o.at("steps")) {
    p.steps.push_back(SplitStep::from_json(s));
    p.steps.back().validate(p.dim);
  }
  if (o.contains("log")) p.log = o.at("log");
  return p;
}

AffineFlow transport_flow(const RMat& g) {
  const int n = static_cast<int>(g.rows());
  if (g.cols() != n) throw Error(ErrorKind::dimension, "transport_flow: G must be square");
  AffineFlow f = AffineFlow::identity(n);
  f.linear.m.topLeftCorner(n, n) = g.inverse().cast<cdouble>();
  f.linear.m.bottomRightCorner(n, n) = g.transpose().cast<cdouble>();
  return f;
}

}  // namespace qs
