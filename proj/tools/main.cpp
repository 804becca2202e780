#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "jobs.hpp"
#include "quadsplit/errors.hpp"
#include "quadsplit/fft.hpp"

namespace {

using qs::cli::JobConfig;

struct Overrides {
  std::string config;
  std::string problem;
  double t = -1.0;
  int steps = -1;
  double theta = 0.0, lambda = 0.0;
  int n = 0;
  double tol = -1.0;
  int threads = 0;
};

JobConfig resolve(const Overrides& o, CLI::App& sub) {
  JobConfig c = o.config.empty() ? JobConfig{} : qs::cli::load_config(o.config);
  if (!o.problem.empty()) c.problem = o.problem;
  if (o.t >= 0.0) c.t_final = o.t;
  if (o.steps >= 0) c.n_steps = o.steps;
  if (sub.count("--theta")) c.params["theta"] = o.theta;
  if (sub.count("--lambda")) c.params["lambda"] = o.lambda;
  if (o.n > 0) c.params["n"] = o.n;
  if (o.tol > 0.0) c.tol = o.tol;
  if (o.threads > 0) c.threads = o.threads;
  if (c.problem.empty()) throw qs::Error(qs::ErrorKind::config, "no problem given (--problem or config)");
  qs::set_threads(c.threads);
  return c;
}

int exit_code(const qs::Error& e) {
  switch (e.kind()) {
    case qs::ErrorKind::divergence:
      return qs::cli::kDiverged;
    case qs::ErrorKind::config:
    case qs::ErrorKind::invalid_argument:
    case qs::ErrorKind::singular_parameter:
    case qs::ErrorKind::dimension:
    case qs::ErrorKind::not_bounded_below:
    case qs::ErrorKind::rank_deficient:
      return qs::cli::kConfigError;
    default:
      return qs::cli::kOther;
  }
}

void add_common(CLI::App* s, Overrides& o) {
  s->add_option("-c,--config", o.config, "JSON job config");
  s->add_option("--problem", o.problem, "harmonic|rotation2d|dilatation|shear_factor|rotation_nd|schrodinger|fokker_planck|kfp|custom_symbol");
  s->add_option("--t", o.t, "final time");
  s->add_option("--theta", o.theta, "rotation angle per unit time");
  s->add_option("--lambda", o.lambda, "dilatation factor per unit time");
  s->add_option("--n", o.n, "dimension");
  s->add_option("--tol", o.tol, "verification tolerance");
  s->add_option("--threads", o.threads, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadsplit: exact splittings of quadratic semigroups"};
  app.require_subcommand(1);
  Overrides o;
  std::string program_out = "program.json", report_out, program_in, csv_out;
  std::vector<double> taus{0.2, 0.1, 0.05};

  auto* factor = app.add_subcommand("factor", "build and verify a splitting program");
  add_common(factor, o);
  factor->add_option("-o,--program-out", program_out, "program file to write");
  factor->add_option("--report-out", report_out, "report file to write");

  auto* solve = app.add_subcommand("solve", "time-step a field");
  add_common(solve, o);
  solve->add_option("--steps", o.steps, "number of steps");
  solve->add_option("-p,--program", program_in, "reuse a program written by factor");

  auto* verify = app.add_subcommand("verify", "check a program file against its target flow");
  verify->add_option("-p,--program", program_in, "program file")->required();
  verify->add_option("--tol", o.tol, "verification tolerance");

  auto* bench = app.add_subcommand("bench", "exact splitting vs Strang baseline");
  add_common(bench, o);
  bench->add_option("--tau", taus, "step sizes");
  bench->add_option("--csv", csv_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qs::cli::kConfigError;
  }

  try {
    if (*factor) return qs::cli::cmd_factor(resolve(o, *factor), program_out, report_out);
    if (*solve) return qs::cli::cmd_solve(resolve(o, *solve), program_in);
    if (*verify) return qs::cli::cmd_verify(program_in, o.tol > 0.0 ? o.tol : 1e-10);
    if (*bench) return qs::cli::cmd_bench(resolve(o, *bench), taus, csv_out);
  } catch (const qs::DivergenceError& e) {
    std::fprintf(stderr, "error: %s (largest convergent step %.17g; subdivide)\n", e.what(), e.safe_t());
    return qs::cli::kDiverged;
  } catch (const qs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qs::cli::kOther;
  }
  return qs::cli::kOther;
}
