#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(UDTOMO_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buffer{};
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
    result.output += buffer.data();
  }
  const int status = pclose(pipe);
  result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace

TEST_CASE("help exits cleanly") {
  const auto r = run("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("qutrit-sphere") != std::string::npos);
}

TEST_CASE("unknown experiment is a usage error") {
  CHECK(run("bogus-experiment").exit_code == 2);
}

TEST_CASE("malformed amplitudes are a usage error") {
  const auto r = run("single --amplitudes 1,0,x --seed 1");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("parse") != std::string::npos);
}

TEST_CASE("single emits a JSON verdict") {
  const auto r = run("single --qutrit 1,0,0 --framework a6 --seed 7");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"category\": \"A\"") != std::string::npos);
}

TEST_CASE("experiment writes the requested file") {
  const std::string out = "/tmp/udtomo_cli_test.csv";
  std::remove(out.c_str());
  const auto r =
      run("qutrit-sphere --framework a6 --samples 6 --seed 3 --jobs 2 --out " + out);
  CHECK(r.exit_code == 0);
  std::ifstream in(out);
  CHECK(in.good());
  std::string first;
  std::getline(in, first);
  CHECK(first == "# schema=udtomo-v1");
  std::remove(out.c_str());
  std::remove((out + ".witnesses.json").c_str());
}

TEST_CASE("flags load from a config file") {
  const std::string conf = "/tmp/udtomo_cli_test.ini";
  {
    std::ofstream f(conf);
    f << "framework=a6\nsamples=5\nseed=17\njobs=2\n";
  }
  const auto r = run("qutrit-sphere --config " + conf);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("wrote 5 rows") != std::string::npos);
  std::remove(conf.c_str());
}

TEST_CASE("invalid rank budget is a usage error") {
  CHECK(run("qutrit-sphere --samples 2 --rank-budget zero").exit_code == 2);
}
