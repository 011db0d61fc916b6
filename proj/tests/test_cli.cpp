// End-to-end checks of the command-line front end: exit-code contract
// (0 success, 2 usage/config, 3 I/O), determinism, and output content.
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CliResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(POLCOUNT_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buffer{};
  std::string output;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
    output += buffer.data();
  }
  const int status = pclose(pipe);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return CliResult{code, output};
}

std::string nominal_config() {
  return std::string(POLCOUNT_SOURCE_DIR) + "/configs/nominal.json";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("analyze prints the derived table for the nominal config") {
  const CliResult r = run_cli("analyze --config " + nominal_config());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("optical depth alpha") != std::string::npos);
  CHECK(r.output.find("1.8493") != std::string::npos);
  CHECK(r.output.find("N_max") != std::string::npos);
  CHECK(r.output.find("defaults applied") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("simulate --config " + nominal_config() + " --trials 0").exit_code == 2);
  CHECK(run_cli("analyze").exit_code == 2);           // missing --config
  CHECK(run_cli("frobnicate").exit_code == 2);        // unknown subcommand
  CHECK(run_cli("classify --mu1 100 --counts -3").exit_code == 2);
}

TEST_CASE("config errors exit with code 2 and name the key") {
  const std::string path = "/tmp/polcount_cli_bad_config.json";
  {
    std::ofstream out(path);
    out << R"({"readout": {"eta_sigma": 0.1}})";
  }
  const CliResult r = run_cli("analyze --config " + path);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("readout.eta_sigma") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("unwritable output paths exit with code 3") {
  const CliResult r = run_cli("simulate --config " + nominal_config() +
                              " --trials 10 --out /nonexistent-dir/out.json");
  CHECK(r.exit_code == 3);
}

TEST_CASE("classify subcommand matches the estimator examples") {
  const CliResult zero = run_cli("classify --mu1 100 --bg 0 --counts 0");
  CHECK(zero.exit_code == 0);
  CHECK(zero.output.find("counts 0 -> n_hat 0") != std::string::npos);

  const CliResult fifty = run_cli("classify --mu1 20 --bg 0 --counts 50");
  CHECK(fifty.output.find("counts 50 -> n_hat 3") != std::string::npos);

  // boundary pair around k*_5 = 548 at mu1 = 100
  const CliResult pair = run_cli("classify --mu1 100 --bg 0 --counts 548 549");
  CHECK(pair.output.find("counts 548 -> n_hat 5") != std::string::npos);
  CHECK(pair.output.find("counts 549 -> n_hat 6") != std::string::npos);
  CHECK(pair.output.find("thresholds") != std::string::npos);
}

TEST_CASE("simulate is byte-deterministic for a fixed seed") {
  const std::string out_a = "/tmp/polcount_cli_sim_a.json";
  const std::string out_b = "/tmp/polcount_cli_sim_b.json";
  const std::string base = "simulate --config " + nominal_config() +
                           " --trials 3000 --seed 7 --out ";
  CHECK(run_cli(base + out_a).exit_code == 0);
  CHECK(run_cli(base + out_b).exit_code == 0);
  CHECK(slurp(out_a) == slurp(out_b));
  CHECK(slurp(out_a).find("\"schema_version\"") != std::string::npos);
  std::remove(out_a.c_str());
  std::remove(out_b.c_str());
}

TEST_CASE("report is deterministic and carries the inconsistency flag") {
  const CliResult once = run_cli("report");
  const CliResult again = run_cli("report");
  CHECK(once.exit_code == 0);
  CHECK(once.output == again.output);
  CHECK(once.output.find("INCONSISTENT") != std::string::npos);
  CHECK(once.output.find("0.1") != std::string::npos);

  const CliResult as_json = run_cli("report --json");
  CHECK(as_json.exit_code == 0);
  CHECK(as_json.output.find("\"inconsistent\": true") != std::string::npos);
}

TEST_CASE("sweep subcommand prints one line per value") {
  const CliResult r = run_cli("sweep --config " + nominal_config() +
                              " --trials 500 --param readout.eta_s"
                              " --values 0.05 0.1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("sweep over readout.eta_s (2 points)") != std::string::npos);

  const CliResult bad = run_cli("sweep --config " + nominal_config() +
                                " --param readout.nope --values 0.1");
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("valid paths") != std::string::npos);
}
