#include "jobs.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "quadsplit/catalog.hpp"
#include "quadsplit/errors.hpp"
#include "quadsplit/field_io.hpp"
#include "quadsplit/oracles.hpp"
#include "quadsplit/schrodinger.hpp"
#include "quadsplit/verify.hpp"

namespace qs::cli {

namespace {

RMat matrix_param(const nlohmann::json& p, const char* key, const RMat& fallback) {
  if (!p.contains(key)) return fallback;
  const auto& rows = p.at(key);
  if (!rows.is_array() || rows.empty()) throw Error(ErrorKind::config, std::string(key) + " must be a nonempty array of rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  RMat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c) throw Error(ErrorKind::config, std::string(key) + " has ragged rows");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = rows[i][k].get<double>();
  }
  return m;
}

int grid_dim(const JobConfig& cfg, int fallback) { return cfg.grid ? cfg.grid->dim() : fallback; }

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  out << text;
}

SplittingProgram load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("bad program file: ") + e.what());
  }
  return SplittingProgram::from_json(j);
}

}  // namespace

JobConfig parse_config(const nlohmann::json& j) {
  try {
    JobConfig c;
    c.problem = j.value("problem", std::string());
    if (j.contains("params")) c.params = j.at("params");
    c.t_final = j.value("t_final", 1.0);
    c.n_steps = j.value("n_steps", 1);
    if (c.n_steps < 0) throw Error(ErrorKind::config, "n_steps must be >= 0");
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.grid = Grid(g.at("sizes").get<std::vector<int>>(), g.at("lo").get<std::vector<double>>(),
                    g.at("hi").get<std::vector<double>>());
    }
    if (j.contains("initial")) c.initial = j.at("initial");
    if (j.contains("outputs")) c.outputs = j.at("outputs");
    if (j.contains("tolerances")) c.tol = j.at("tolerances").value("verify", c.tol);
    c.threads = j.value("threads", 1);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("config: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

SplittingProgram build_program(const JobConfig& cfg, double t) {
  const auto& p = cfg.params;
  const std::string& k = cfg.problem;
  if (k == "harmonic") return harmonic_oscillator(t, p.value("n", grid_dim(cfg, 1)));
  if (k == "rotation2d") return rotation2d(p.value("theta", 0.0) * t);
  if (k == "dilatation") {
    const double lambda = p.value("lambda", 1.0);
    if (!(lambda > 0.0)) throw Error(ErrorKind::config, "dilatation: lambda must be > 0");
    return dilatation(std::pow(lambda, t));
  }
  if (k == "shear_factor") return shear_factorize(matrix_param(p, "G", RMat::Identity(grid_dim(cfg, 2), grid_dim(cfg, 2))));
  if (k == "rotation_nd") {
    if (!p.contains("M")) throw Error(ErrorKind::config, "rotation_nd: params.M required");
    return rotation_nd(matrix_param(p, "M", RMat()), t);
  }
  if (k == "schrodinger") {
    const int n = p.value("n", grid_dim(cfg, 2));
    RMat b0 = RMat::Zero(n, n);
    if (n == 2) b0 << 0.0, 1.0, -1.0, 0.0;
    const RMat V = matrix_param(p, "V", RMat::Identity(n, n));
    const RMat B = matrix_param(p, "B", b0);
    FixedPointOptions opt;
    opt.tol = p.value("iteration_tol", opt.tol);
    opt.max_iter = p.value("max_iter", opt.max_iter);
    return schrodinger_program(schrodinger_coefficients(V, B, t, opt), V, B);
  }
  if (k == "fokker_planck") return fokker_planck(t);
  if (k == "kfp") return kramers_fokker_planck(t);
  if (k == "custom_symbol") {
    if (!p.contains("symbol")) throw Error(ErrorKind::config, "custom_symbol: params.symbol required");
    const QuadraticSymbol s = QuadraticSymbol::from_json(p.at("symbol"));
    if (s.Q().norm() != 0.0)
      throw Error(ErrorKind::config, "custom_symbol: only linear symbols have a direct exact splitting; use a named problem");
    // p = -i l + c with l real: e^{-t p^w} = e^{-tc} e^{i t l^w}.
    const CVec ly = cdouble(0.0, 1.0) * s.Y();
    if (ly.size() == 0 || ly.imag().cwiseAbs().maxCoeff() > 1e-14)
      throw Error(ErrorKind::config, "custom_symbol: linear part must be purely imaginary");
    SplittingProgram prog = affine_linear_split(QuadraticSymbol(s.dim(), CMat::Zero(2 * s.dim(), 2 * s.dim()), CVec(ly.real().cast<cdouble>())), t);
    if (s.c() != 0.0) prog.steps.push_back(SplitStep::scalar(-t * s.c()));
    prog.target = s;
    prog.t = t;
    prog.provenance = "custom_symbol";
    return prog;
  }
  throw Error(ErrorKind::config, "unknown problem '" + k + "'");
}

StateField initial_field(const JobConfig& cfg) {
  if (!cfg.grid) throw Error(ErrorKind::config, "solve: grid required");
  const Grid& g = *cfg.grid;
  const auto& ic = cfg.initial;
  const std::string type = ic.value("type", std::string("gaussian"));
  if (type == "file") {
    StateField f = read_field(ic.at("path").get<std::string>());
    if (!(f.grid == g)) throw Error(ErrorKind::config, "initial field grid does not match config grid");
    return f;
  }
  if (type == "gaussian") {
    std::vector<double> c = ic.value("center", std::vector<double>(g.dim(), 0.0));
    const double w = ic.value("width", 1.0);
    if (static_cast<int>(c.size()) != g.dim()) throw Error(ErrorKind::config, "gaussian center has wrong dimension");
    if (!(w > 0.0)) throw Error(ErrorKind::config, "gaussian width must be > 0");
    return StateField::from_function(g, [c, w](const std::vector<double>& x) {
      double r2 = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
      return std::complex<double>(std::exp(-0.5 * r2 / (w * w)), 0.0);
    });
  }
  if (type == "preset") {
    const std::string name = ic.value("name", std::string());
    if (name == "ground_state") return StateField::from_function(g, oracles::ground_state());
    if (name == "maxwellian") {
      if (g.dim() != 2) throw Error(ErrorKind::config, "maxwellian preset needs a 2-D (x, v) grid");
      return StateField::from_function(g, oracles::maxwellian());
    }
    throw Error(ErrorKind::config, "unknown preset '" + name + "'");
  }
  throw Error(ErrorKind::config, "unknown initial type '" + type + "'");
}

int cmd_factor(const JobConfig& cfg, const std::string& program_out, const std::string& report_out) {
  const SplittingProgram prog = build_program(cfg, cfg.t_final);
  const SplitReport rep = verify_program(prog, cfg.tol);
  if (!program_out.empty()) write_text(program_out, prog.to_json().dump(2) + "\n");
  nlohmann::json out = rep.to_json();
  if (!prog.log.is_null() && !prog.log.empty()) out["iteration_log"] = prog.log;
  if (!report_out.empty()) write_text(report_out, out.dump(2) + "\n");
  print_json(out);
  return rep.ok ? kOk : kVerifyFailed;
}

int cmd_verify(const std::string& program_in, double tol) {
  const SplittingProgram prog = load_program(program_in);
  const SplitReport rep = verify_program(prog, tol);
  print_json(rep.to_json());
  return rep.ok ? kOk : kVerifyFailed;
}

int cmd_solve(const JobConfig& cfg, const std::string& program_in) {
  StateField f = initial_field(cfg);
  const std::string dir = cfg.outputs.value("dir", std::string("."));
  std::filesystem::create_directories(dir);
  const int dump_every = cfg.outputs.value("dump_every", 0);
  const std::string diag_path = cfg.outputs.value("diagnostics", std::string());
  const double dt = cfg.n_steps > 0 ? cfg.t_final / cfg.n_steps : 0.0;

  std::optional<SplittingProgram> prog;
  if (cfg.n_steps > 0) {
    prog = program_in.empty() ? build_program(cfg, dt) : load_program(program_in);
    if (prog->dim != f.grid.dim()) throw Error(ErrorKind::config, "program and grid dimensions differ");
  }
  const double norm0 = l2_norm(f);
  std::vector<StepDiagnostic> diag;
  ExecutionStats total;
  for (int s = 0; s < cfg.n_steps; ++s) {
    std::vector<StepDiagnostic> rows;
    total += execute(f, *prog, true, &rows);
    for (auto& r : rows) {
      r.step_index += s * static_cast<int>(prog->steps.size());
      diag.push_back(r);
    }
    if (dump_every > 0 && (s + 1) % dump_every == 0) write_field(dir + "/field_" + std::to_string(s + 1) + ".bin", f);
  }
  write_field(dir + "/field_final.bin", f);
  if (!diag_path.empty()) write_diagnostics_csv(diag_path, diag);

  const double norm1 = l2_norm(f);
  nlohmann::json out;
  out["steps"] = cfg.n_steps;
  out["dt"] = dt;
  out["norm_initial"] = norm0;
  out["norm_final"] = norm1;
  out["norm_ratio"] = norm0 > 0.0 ? norm1 / norm0 : 0.0;
  out["boundary_mass"] = boundary_mass(f);
  out["fft_passes"] = total.fft_passes;
  out["fft_1d_calls"] = total.fft_1d_calls;
  out["pointwise_mults"] = total.pointwise_mults;
  out["wall_seconds"] = total.wall_seconds;
  out["field"] = dir + "/field_final.bin";
  print_json(out);
  return kOk;
}

int cmd_bench(const JobConfig& cfg, const std::vector<double>& taus, const std::string& csv_out) {
  if (!cfg.grid) throw Error(ErrorKind::config, "bench: grid required");
  const Grid& g = *cfg.grid;
  const StateField u0 = initial_field(cfg);
  const double T = cfg.t_final;

  // Reference at T: analytic for the harmonic Gaussian, dense oracle otherwise.
  StateField ref(g);
  const bool harmonic = cfg.problem == "harmonic";
  const std::string type = cfg.initial.value("type", std::string("gaussian"));
  if (harmonic && g.dim() == 1 && type == "gaussian" && cfg.initial.value("width", 1.0) == 1.0) {
    const double x0 = cfg.initial.value("center", std::vector<double>{0.0})[0];
    ref = StateField::from_function(g, oracles::harmonic_gaussian(x0, T));
  } else {
    if (g.total() > oracles::kMaxDenseUnknowns) throw Error(ErrorKind::config, "bench: grid too large for the dense oracle");
    const SplittingProgram whole = build_program(cfg, T);
    if (whole.target_flow) throw Error(ErrorKind::config, "bench: problem has no symbol for the dense oracle");
    const auto op = oracles::discretize_weyl(whole.target, g);
    ref = oracles::from_vector(g, oracles::dense_semigroup_apply(op, whole.t, oracles::to_vector(u0)));
  }

  std::FILE* fp = csv_out.empty() ? stdout : std::fopen(csv_out.c_str(), "w");
  if (!fp) throw Error(ErrorKind::io, "cannot open " + csv_out);
  std::fprintf(fp, "method,t,steps,fft_calls,error_vs_oracle,wall_time\n");
  for (double tau : taus) {
    const int steps = std::max(1, static_cast<int>(std::lround(T / tau)));
    const double dt = T / steps;
    std::vector<std::pair<std::string, SplittingProgram>> methods{{"exact", build_program(cfg, dt)}};
    if (harmonic) methods.emplace_back("strang", oracles::strang_harmonic(dt, g.dim()));
    for (const auto& [name, prog] : methods) {
      StateField f = u0;
      ExecutionStats st;
      for (int s = 0; s < steps; ++s) st += execute(f, prog);
      std::fprintf(fp, "%s,%.17g,%d,%lld,%.17g,%.17g\n", name.c_str(), dt, steps, st.fft_1d_calls, l2_error(f, ref),
                   st.wall_seconds);
    }
  }
  if (fp != stdout) std::fclose(fp);
  return kOk;
}

}  // namespace qs::cli
