#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "boxsat/cli.hpp"

using namespace boxsat;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "cli_test_tmp_" + std::to_string(counter++) + ".json";
    std::ofstream f(path);
    f << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli: solve exit codes") {
  RunResult r = run({"solve", "--logic", "D2K", "--formula", "[3]p & [1]~p"});
  REQUIRE(r.code == 1);
  REQUIRE(r.out.find("UNSAT") != std::string::npos);

  r = run({"solve", "--logic", "D2K", "--formula", "[3]q & ~q"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("SAT") != std::string::npos);

  // diamond in the inclusion fragment is a usage error
  r = run({"solve", "--logic", "D2K", "--formula", "<1>p"});
  REQUIRE(r.code == 2);

  r = run({"solve", "--logic", "NOPE", "--formula", "p"});
  REQUIRE(r.code == 2);

  r = run({"solve", "--logic", "D2K", "--formula", "p & & q"});
  REQUIRE(r.code == 2);
  REQUIRE(r.err.find("parse error") != std::string::npos);
}

TEST_CASE("cli: classify") {
  RunResult r = run({"classify", "--logic", "D2K4"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("EXP-complete") != std::string::npos);

  r = run({"classify", "--logic", "D4K4", "--json"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j["case"] == 4);
  REQUIRE(j["one_var_class"] == "P");
}

TEST_CASE("cli: logic spec file") {
  TempFile spec(R"({"agents": 3, "frames": {"1": "D", "2": "D", "3": "K4"},
                    "inclusions": [[1,3],[2,3]]})");
  RunResult r = run({"classify", "--logic", spec.path});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("EXP-complete") != std::string::npos);
}

TEST_CASE("cli: machine-mode model round-trips through check-model") {
  RunResult r = run({"solve", "--logic", "D2K4", "--formula",
                     "[3]q & ~q", "--json"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j["verdict"] == "sat");
  TempFile model(j["model"].dump());
  RunResult c = run({"check-model", "--logic", "D2K4", "--model", model.path,
                     "--formula", "[3]q & ~q"});
  REQUIRE(c.code == 0);
  RunResult c2 = run({"check-model", "--logic", "D2K4", "--model", model.path,
                      "--formula", "q"});
  REQUIRE(c2.code == 1);  // root does not satisfy q
}

TEST_CASE("cli: solve-k and oracle") {
  RunResult r = run({"solve-k", "--formula", "<1>p & [1]~p"});
  REQUIRE(r.code == 1);
  r = run({"solve-k", "--formula", "<1>p & <1>~p", "--json"});
  REQUIRE(r.code == 0);

  r = run({"oracle", "--logic", "D2K", "--formula", "false", "--bound", "2"});
  REQUIRE(r.code == 1);
  r = run({"oracle", "--logic", "D2K", "--formula", "[3]q & ~q", "--bound", "3",
           "--json"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j["result"] == "sat-witness");
}

TEST_CASE("cli: translate") {
  RunResult r = run({"translate", "--which", "k2d2k", "--formula", "<1>p"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "[2](p & q) & q\n");

  r = run({"translate", "--which", "dk4-d4k4", "--formula", "[2]p"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "[1][3][2]p\n");

  r = run({"translate", "--which", "embed", "--formula", "[1]p", "--logic",
           "D2K4", "--mode", "pair-simple", "--agents", "1,2,3"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "[1][1][1][2][1][2][1][1]p\n");

  // hypothesis failure is a usage error
  r = run({"translate", "--which", "embed", "--formula", "[1]p", "--logic",
           "D42K4", "--mode", "pair-simple", "--agents", "1,2,3"});
  REQUIRE(r.code == 2);
  REQUIRE(r.err.find("case 1") != std::string::npos);

  r = run({"translate", "--which", "nope", "--formula", "p"});
  REQUIRE(r.code == 2);
}

TEST_CASE("cli: trace output") {
  RunResult r = run({"trace", "--logic", "D2K", "--formula", "[3]p"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("R1 0 [3]p => 0 [1]p") != std::string::npos);
  REQUIRE(r.out.find("R2 0 [1]p => 0.1 p") != std::string::npos);

  r = run({"trace", "--logic", "D2K4", "--formula", "[3]p", "--json"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  bool r4_seen = false;
  for (auto& rec : j["records"])
    if (rec["rule"] == "R4" && rec["target"] == "0.1") r4_seen = true;
  REQUIRE(r4_seen);
}

TEST_CASE("cli: atm subcommand") {
  TempFile machine(R"({
    "states": ["y", "n"], "existential": ["y", "n"], "universal": [],
    "alphabet": ["b"], "delta1": [], "delta2": [],
    "start": "y", "accept": "y", "reject": "n",
    "input": "b", "space_bound": 1})");
  RunResult r = run({"atm", "--file", machine.path, "--solve"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("SAT") != std::string::npos);

  r = run({"atm", "--file", machine.path, "--solve", "--deterministic"});
  REQUIRE(r.code == 0);

  r = run({"atm", "--file", machine.path});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("q_y") != std::string::npos);

  TempFile rejecting(R"({
    "states": ["y", "n"], "existential": ["y", "n"], "universal": [],
    "alphabet": ["b"], "delta1": [], "delta2": [],
    "start": "n", "accept": "y", "reject": "n",
    "input": "b", "space_bound": 1})");
  r = run({"atm", "--file", rejecting.path, "--solve"});
  REQUIRE(r.code == 1);

  r = run({"atm", "--file", "does_not_exist.json", "--solve"});
  REQUIRE(r.code == 2);
}

TEST_CASE("cli: usage errors") {
  REQUIRE(run({}).code == 2);
  REQUIRE(run({"solve"}).code == 2);                       // missing logic
  REQUIRE(run({"solve", "--logic", "D2K"}).code == 2);     // missing formula
  REQUIRE(run({"unknown-subcommand"}).code == 2);
  REQUIRE(run({"solve", "--logic", "D2K", "--formula", "p", "--formula-file",
               "x"})
              .code == 2);
}
