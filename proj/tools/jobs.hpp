#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "quadsplit/program.hpp"
#include "quadsplit/spectral.hpp"

namespace qs::cli {

enum ExitCode { kOk = 0, kOther = 1, kVerifyFailed = 2, kDiverged = 3, kConfigError = 4 };

struct JobConfig {
  std::string problem;
  nlohmann::json params = nlohmann::json::object();
  double t_final = 1.0;
  int n_steps = 1;
  std::optional<Grid> grid;
  nlohmann::json initial = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  double tol = 1e-10;
  int threads = 1;
};

JobConfig load_config(const std::string& path);
JobConfig parse_config(const nlohmann::json& j);

// Program for one step of length t.
SplittingProgram build_program(const JobConfig& cfg, double t);
StateField initial_field(const JobConfig& cfg);

int cmd_factor(const JobConfig& cfg, const std::string& program_out, const std::string& report_out);
int cmd_solve(const JobConfig& cfg, const std::string& program_in);
int cmd_verify(const std::string& program_in, double tol);
int cmd_bench(const JobConfig& cfg, const std::vector<double>& taus, const std::string& csv_out);

}  // namespace qs::cli
