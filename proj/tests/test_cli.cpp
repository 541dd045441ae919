#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rlab/cli.hpp"

namespace {

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  int code = rlab::cli::run(std::move(args), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST_CASE("generate emits bits and a descriptor") {
  std::string text;
  int code = run_cli({"generate", "ac0", "--n", "12", "--M", "8", "--d", "2",
                      "--eps", "0.1", "--seed", "0"},
                     &text);
  CHECK(code == 0);
  CHECK(text.find("\"output_bits\"") != std::string::npos);
  CHECK(text.find("\"descriptor\"") != std::string::npos);
  CHECK(text.find("\"run_config\"") != std::string::npos);

  // deterministic under the same seed
  std::string again;
  run_cli({"generate", "ac0", "--n", "12", "--M", "8", "--d", "2", "--eps",
           "0.1", "--seed", "0"},
          &again);
  CHECK(text == again);

  std::string f2;
  code = run_cli({"generate", "f2", "--n", "12", "--S", "8", "--eps", "0.1",
                  "--seed", "1"},
                 &f2);
  CHECK(code == 0);
  CHECK(f2.find("f2(S=8)") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({"generate", "nope"}) == 2);
  CHECK(run_cli({"verify", "bogus-suite"}) == 2);
  CHECK(run_cli({"verify", "circuit", "--trials", "0"}) == 2);
  CHECK(run_cli({"definitely-not-a-command"}) == 2);
}

TEST_CASE("verify circuit suite passes on the shipped corpus") {
  std::string text;
  int code = run_cli({"verify", "circuit", "--seed", "7"}, &text);
  CHECK(code == 0);
  CHECK(text.find("\"pass\":") != std::string::npos);
}

TEST_CASE("verify encdec suite passes") {
  std::string text;
  int code = run_cli({"verify", "encdec", "--seed", "7"}, &text);
  CHECK(code == 0);
}

TEST_CASE("sweep emits a fixed csv schema deterministically") {
  std::string a, b;
  int code = run_cli({"sweep", "--n", "10", "--M", "2", "--k", "2", "--Q", "3",
                      "--l", "2", "--t", "2,3,4", "--p", "2^-4", "--trials",
                      "500", "--seed", "3"},
                     &a);
  CHECK(code == 0);
  run_cli({"sweep", "--n", "10", "--M", "2", "--k", "2", "--Q", "3", "--l", "2",
           "--t", "2,3,4", "--p", "2^-4", "--trials", "500", "--seed", "3"},
          &b);
  CHECK(a == b);
  // header + three rows
  CHECK(a.find("family,source,l,t,mode") != std::string::npos);
  int rows = 0;
  std::istringstream lines(a);
  std::string line;
  while (std::getline(lines, line))
    if (line.find("R_p") != std::string::npos) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("config file applies and flags override") {
  std::string path = "/tmp/rlab_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"seed": 5, "trials": 123, "params": {"A_f2": 3.0}})";
  }
  std::string text;
  int code =
      run_cli({"--config", path, "--trials", "200", "verify", "encdec"}, &text);
  CHECK(code == 0);
  CHECK(text.find("\"trials\":200") != std::string::npos);
  CHECK(text.find("\"seed\":5") != std::string::npos);
  CHECK(text.find("\"A_f2\":3.0") != std::string::npos);
}
