// Integration tests for the fpsdae binary: determinism, golden outputs, and
// the exit-code contract.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  std::string out_file = "/tmp/fpsdae_cli_test_out.txt";
  std::string cmd = std::string(FPSDAE_BIN) + " " + args + " > " + out_file + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(rc);
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string instances() { return FPSDAE_INSTANCES; }
std::string golden(const std::string& name) {
  std::ifstream in(std::string(FPSDAE_GOLDEN) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("identical invocations produce byte-identical reports") {
  const std::string cmds[] = {
      "analyze " + instances() + "/euler.json",
      "solve " + instances() + "/euler.json --free 3=1",
      "solve " + instances() + "/multiroot.json",
      "solve " + instances() + "/multiroot_quadratic.json",
      "oracle " + instances() + "/parabola.json",
      "tougeron " + instances() + "/sqdiff.json",
      "stability " + instances() + "/parabola.json --perturb y(0)^3",
  };
  for (const auto& cmd : cmds) {
    auto a = run_cli(cmd);
    auto b = run_cli(cmd);
    CHECK(a.exit_code == b.exit_code);
    CHECK(a.output == b.output);
    CHECK(!a.output.empty());
  }
}

TEST_CASE("reports match the golden files byte for byte") {
  CHECK(run_cli("analyze " + instances() + "/euler.json").output == golden("analyze_euler.json"));
  CHECK(run_cli("solve " + instances() + "/euler.json --free 3=1").output ==
        golden("solve_euler.json"));
  CHECK(run_cli("solve " + instances() + "/parabola.json").output ==
        golden("solve_parabola.json"));
  CHECK(run_cli("analyze " + instances() + "/parabola.json").output ==
        golden("analyze_parabola.json"));
  CHECK(run_cli("solve " + instances() + "/coshsinh.json").output ==
        golden("solve_coshsinh.json"));
}

TEST_CASE("exit codes follow the contract") {
  CHECK(run_cli("solve " + instances() + "/euler.json --free 3=1").exit_code == 0);
  CHECK(run_cli("solve --bogus-flag " + instances() + "/euler.json").exit_code == 2);
  CHECK(run_cli("solve " + instances() + "/no_such_file.json").exit_code == 3);
  CHECK(run_cli("analyze " + instances() + "/exponential.json --m 1").exit_code == 4);
  CHECK(run_cli("solve " + instances() + "/euler_obstructed.json").exit_code == 5);
}

TEST_CASE("schema violations exit with code 3") {
  std::ofstream bad("/tmp/fpsdae_bad.json");
  bad << "{\"equations\": [\"y(2)\"], \"n\": 1, \"d\": 1, \"field\": \"rational\"}";
  bad.close();
  CHECK(run_cli("analyze /tmp/fpsdae_bad.json").exit_code == 3);

  std::ofstream garbled("/tmp/fpsdae_garbled.json");
  garbled << "{not json";
  garbled.close();
  CHECK(run_cli("analyze /tmp/fpsdae_garbled.json").exit_code == 3);
}

TEST_CASE("solve output round-trips through verify and oracle diff") {
  auto solve_out = run_cli("solve " + instances() + "/euler.json --free 3=1 -o /tmp/fpsdae_euler_solution.json");
  REQUIRE(solve_out.exit_code == 0);
  auto verify_out = run_cli("verify " + instances() +
                            "/euler.json --solution /tmp/fpsdae_euler_solution.json");
  CHECK(verify_out.exit_code == 0);
  CHECK(verify_out.output.find("\"pass\": true") != std::string::npos);
  auto diff_out = run_cli("oracle " + instances() +
                          "/euler.json --free 3=1 --diff /tmp/fpsdae_euler_solution.json");
  CHECK(diff_out.exit_code == 0);
  CHECK(diff_out.output.find("\"max_abs_delta\": 0.0") != std::string::npos);
}

TEST_CASE("scan mode reports the first failing hypothesis per level") {
  auto r = run_cli("analyze " + instances() + "/euler.json --scan-m 1..2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"scan\"") != std::string::npos);
  CHECK(r.output.find("lower separant matrix is nonzero") != std::string::npos);
}

TEST_CASE("tolerance environment variable applies when the file sets none") {
  std::string cmd = std::string("FPSDAE_TOL=atol=1e-6,rtol=1e-5 ") + FPSDAE_BIN + " analyze " +
                    instances() + "/euler.json > /tmp/fpsdae_envtol.txt 2>/dev/null";
  int rc = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(rc) == 0);
}
