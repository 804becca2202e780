#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::filesystem::path& cwd) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" + QS_CLI_PATH + "' " + args + " 2>&1";
  Run r;
  std::FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path workdir(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / ("qs_cli_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

void write(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json last_json(const std::string& out) { return nlohmann::json::parse(out.substr(out.find('{'))); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("factor harmonic") {
  const auto d = workdir("factor");
  const Run r = run("factor --problem harmonic --t 0.5 -o prog.json", d);
  REQUIRE(r.code == 0);
  const auto rep = last_json(r.out);
  CHECK(rep.at("steps") == 3);
  CHECK(rep.at("residual").get<double>() <= 1e-12);
  CHECK(run("verify -p prog.json", d).code == 0);
}

TEST_CASE("factor reports singular angles and bad configs") {
  const auto d = workdir("errors");
  const Run r = run("factor --problem rotation2d --theta 3.1415", d);
  CHECK(r.code == 4);
  CHECK(r.out.find("near-singular angle") != std::string::npos);
  CHECK(run("factor --problem nonsense", d).code == 4);
  CHECK(run("factor -c missing.json", d).code == 4);
  write(d / "bad.json", "{ not json");
  CHECK(run("factor -c bad.json", d).code == 4);
}

TEST_CASE("factor schrodinger writes an iteration log") {
  const auto d = workdir("schro");
  const Run r = run("factor --problem schrodinger --n 2 --t 0.1 -o s.json", d);
  REQUIRE(r.code == 0);
  const auto rep = last_json(r.out);
  CHECK(rep.at("iteration_log").size() > 3);
  CHECK(rep.at("iteration_log")[0].contains("digest"));
}

TEST_CASE("divergence exits with code 3") {
  const auto d = workdir("diverge");
  write(d / "c.json", R"({"problem":"schrodinger","t_final":6.0,"params":{"n":2}})");
  const Run r = run("factor -c c.json", d);
  CHECK(r.code == 3);
  CHECK(r.out.find("largest convergent") != std::string::npos);
}

TEST_CASE("verification failure exits with code 2") {
  const auto d = workdir("verify");
  REQUIRE(run("factor --problem harmonic --t 0.5 -o prog.json", d).code == 0);
  auto prog = nlohmann::json::parse(slurp(d / "prog.json"));
  prog["steps"][1]["a"][0] = prog["steps"][1]["a"][0].get<double>() + 1e-3;
  write(d / "bad.json", prog.dump());
  CHECK(run("verify -p bad.json", d).code == 2);
}

TEST_CASE("solve harmonic ground state") {
  const auto d = workdir("solve");
  write(d / "c.json", R"({"problem":"harmonic","t_final":1.0,"n_steps":10,
    "grid":{"sizes":[128],"lo":[-10],"hi":[10]},
    "initial":{"type":"preset","name":"ground_state"},
    "outputs":{"dir":"out","diagnostics":"diag.csv"}})");
  const Run r = run("solve -c c.json", d);
  REQUIRE(r.code == 0);
  const auto s = last_json(r.out);
  CHECK(s.at("norm_ratio").get<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  CHECK(std::filesystem::exists(d / "out" / "field_final.bin"));
  CHECK(slurp(d / "diag.csv").rfind("step_index,kind,norm_after,fft_calls\n", 0) == 0);
}

TEST_CASE("solve with zero steps copies the field") {
  const auto d = workdir("zero");
  write(d / "c.json", R"({"problem":"harmonic","n_steps":0,"grid":{"sizes":[16],"lo":[-4],"hi":[4]},
    "initial":{"type":"gaussian","center":[0.3],"width":0.8},"outputs":{"dir":"a"}})");
  REQUIRE(run("solve -c c.json", d).code == 0);
  write(d / "c2.json", R"({"problem":"harmonic","n_steps":0,"grid":{"sizes":[16],"lo":[-4],"hi":[4]},
    "initial":{"type":"file","path":"a/field_final.bin"},"outputs":{"dir":"b"}})");
  REQUIRE(run("solve -c c2.json", d).code == 0);
  CHECK(slurp(d / "a" / "field_final.bin") == slurp(d / "b" / "field_final.bin"));
}

TEST_CASE("factored program reproduces solve diagnostics") {
  const auto d = workdir("roundtrip");
  const std::string base = R"("problem":"fokker_planck","t_final":0.5,"n_steps":2,
    "grid":{"sizes":[32,32],"lo":[-8,-8],"hi":[8,8]},"initial":{"type":"preset","name":"maxwellian"})";
  write(d / "a.json", "{" + base + R"(,"outputs":{"dir":"a","diagnostics":"a.csv"}})");
  write(d / "b.json", "{" + base + R"(,"outputs":{"dir":"b","diagnostics":"b.csv"}})");
  write(d / "f.json", R"({"problem":"fokker_planck","t_final":0.25})");
  REQUIRE(run("factor -c f.json -o p.json", d).code == 0);
  REQUIRE(run("solve -c a.json", d).code == 0);
  REQUIRE(run("solve -c b.json -p p.json", d).code == 0);
  CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
  CHECK(slurp(d / "a" / "field_final.bin") == slurp(d / "b" / "field_final.bin"));
}

TEST_CASE("bench emits comparison rows") {
  const auto d = workdir("bench");
  write(d / "c.json", R"({"problem":"harmonic","t_final":1.0,"grid":{"sizes":[32],"lo":[-6],"hi":[6]},
    "initial":{"type":"gaussian","center":[1.0],"width":1.0}})");
  const Run r = run("bench -c c.json --tau 0.2 0.1 0.05 --csv b.csv", d);
  REQUIRE(r.code == 0);
  std::istringstream in(slurp(d / "b.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,t,steps,fft_calls,error_vs_oracle,wall_time");
  std::vector<std::array<std::string, 6>> rows;
  while (std::getline(in, line)) {
    std::array<std::string, 6> f;
    std::istringstream ls(line);
    for (auto& x : f) std::getline(ls, x, ',');
    rows.push_back(f);
  }
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    CHECK(rows[i][0] == "exact");
    CHECK(rows[i + 1][0] == "strang");
    CHECK(rows[i][3] == rows[i + 1][3]);
  }
  const double s1 = std::stod(rows[1][4]), s2 = std::stod(rows[3][4]), s3 = std::stod(rows[5][4]);
  CHECK(s1 / s2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(s2 / s3 == doctest::Approx(4.0).epsilon(0.1));
  const double e1 = std::stod(rows[0][4]), e3 = std::stod(rows[4][4]);
  CHECK(std::abs(e1 / e3 - 1.0) < 0.05);
}

}
