#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "stord/cli.hpp"

using stord::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "stord");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = stord::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) { return std::string(STORD_SCENARIO_DIR) + "/" + name + ".json"; }

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("stord_cli_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: classify and major examples") {
  auto r = run({"classify", "--p", "2", "--q", "2"});
  CHECK(r.code == 0);
  CHECK(r.out == "A3\n");

  r = run({"major", "--x", "2,2,2", "--y", "3,2,1", "--mode", "m"});
  CHECK(r.code == 0);
  CHECK(r.out == "true\n");

  r = run({"major", "--x", "3,2,1", "--y", "2,2,2"});
  CHECK(r.code == 0);
  CHECK(r.out == "false\n");

  CHECK(run({"classify", "--p", "1.5", "--q", "2"}).out == "NONE\n");
}

TEST_CASE("cli: counterexample example") {
  const auto r = run({"counterexample", "--alpha", "1", "--a", "2,1,1", "--b", "1.5,1.5,1", "--n-samples", "20000"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["tool"] == "stord");
  CHECK(j["version"] == "1.0.0");
  CHECK(j["command"] == "counterexample");
  CHECK(j["config"]["alpha"] == 1.0);
  CHECK(j["result"]["oracle_verdict"]["crossing_count"] == 1);
  CHECK(j["result"]["oracle_verdict"]["relation"] == "CROSSING");
  CHECK(j["result"]["consistent"] == true);
}

TEST_CASE("cli: verify runs every bundled scenario") {
  for (const auto& entry : fs::directory_iterator(STORD_SCENARIO_DIR)) {
    const std::string path = entry.path().string();
    INFO(path);
    const auto r = run({"verify", path, "--n-samples", "20000"});
    const json j = json::parse(r.out);
    CHECK(j["config"]["n_samples"] == 20000);
    if (entry.path().stem() == "identity-phi") {
      CHECK(r.code == 2);
      CHECK(j["result"]["hypothesis"]["conditions_ok"]["status"] == "FAIL");
      CHECK(j["result"]["error"].get<std::string>().find("conditions_ok") != std::string::npos);
    } else {
      CHECK(r.code == 0);
      CHECK(j["result"]["consistent"] == true);
      CHECK(j["result"]["status"] == "EVALUATED");
    }
  }
}

TEST_CASE("cli: verify theorem selection") {
  auto r = run({"verify", scenario("noniid-exp-exp"), "--theorem", "iid", "--n-samples", "5000"});
  CHECK(r.code == 2);
  r = run({"verify", scenario("exp-exp"), "--theorem", "noniid", "--n-samples", "5000"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["result"]["theorem"] == "noniid");
}

TEST_CASE("cli: usage and config errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"classify", "--p", "2"}).code == 1);
  CHECK(run({"major", "--x", "1,a", "--y", "1,2"}).code == 1);
  CHECK(run({"major", "--x", "1,2", "--y", "1,2", "--mode", "both"}).code == 1);
  CHECK(run({"classify", "--p", "0", "--q", "2"}).code == 1);
  CHECK(run({"major", "--x", "1,2", "--y", "1,2,3"}).code == 1);

  auto r = run({"logconcave", "--dist", "gengamma:1:-1:1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("field 'dist'") != std::string::npos);

  r = run({"verify", "/nonexistent/scenario.json"});
  CHECK(r.code == 1);

  const fs::path dir = temp_dir("config");
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"dists": [["gengamma", 1, 1, 1]], "phi": "exp", "variant": "convex", "a": [1], "b": [1]})";
  r = run({"verify", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("field 'psi'") != std::string::npos);

  std::ofstream(bad) << R"({"dists": [["gengamma", 1, 1, 1]], "phi": ["power", 0], "psi": "exp", "variant": "convex", "a": [1], "b": [1]})";
  r = run({"verify", bad.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("field 'phi'") != std::string::npos);

  // Domain error: exp has no inverse at 0.
  std::ofstream(bad) << R"({"dists": [["gengamma", 1, 1, 1], ["gengamma", 1, 1, 1]], "phi": "exp", "psi": "exp",
                            "variant": "convex", "a": [0, 1], "b": [0.5, 0.5]})";
  CHECK(run({"verify", bad.string()}).code == 1);

  CHECK(run({"suite", "--presets", "nope"}).code == 1);
  CHECK(run({"classify", "--p", "2", "--q", "2", "--format", "xml"}).code == 1);
}

TEST_CASE("cli: help and version exit 0") {
  auto r = run({"--version"});
  CHECK(r.code == 0);
  CHECK(r.out.find("1.0.0") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli: conditions, logconcave, lr and chain reports") {
  auto r = run({"conditions", "--phi", "exp", "--psi", "exp"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["result"]["holds"] == true);
  CHECK(j["config"]["variant"] == "convex");

  r = run({"conditions", "--phi", "power:1", "--psi", "exp", "--grid-points", "16"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["condition_b_holds"] == false);

  r = run({"logconcave", "--dist", "gengamma:1:0.5:1"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["verdict"] == "NOT_LOG_CONCAVE");
  r = run({"logconcave", "--dist", "gengamma:2:3:1", "--transform", "power:2"});
  CHECK(json::parse(r.out)["result"]["verdict"] == "LOG_CONCAVE");
  r = run({"logconcave", "--dist", "gengamma:2:3:1", "--transform", "log"});
  CHECK(json::parse(r.out)["result"]["verdict"] == "LOG_CONCAVE");

  r = run({"lr", "--d1", "gengamma:1:2:1", "--d2", "gengamma:1:2:2"});
  CHECK(json::parse(r.out)["result"]["verdict"] == "D1_LR_GREATER");
  r = run({"lr", "--d1", "invgengamma:1:2:1", "--d2", "invgengamma:1:2:2"});
  CHECK(json::parse(r.out)["result"]["verdict"] == "D2_LR_GREATER");

  r = run({"chain", "--x", "2,2,2", "--y", "3,2,1"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["result"]["steps"].back() == json::array({1.0, 2.0, 3.0}));
  CHECK(j["result"]["moves"].get<int>() <= 2);

  r = run({"chain", "--x", "3,1", "--y", "2,1", "--weak", "sub"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["completion"] == json::array({2.0, 1.0}));
  CHECK(run({"chain", "--x", "1,3", "--y", "1,4", "--weak", "sub"}).code == 2);

  r = run({"chain", "--x", "3,2,1", "--y", "2,2,2"});
  CHECK(r.code == 2);
}

TEST_CASE("cli: convolve exports CSV by default and JSON on request") {
  auto r = run({"convolve", "--dist", "gengamma:1:1:1", "--dist", "gengamma:1:1:1", "--weights", "1,1"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "abscissa,value");
  std::size_t rows = 0;
  double x = 0, v = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    x = std::stod(line.substr(0, comma));
    v = std::stod(line.substr(comma + 1));
    if (x > 2.0 && x < 2.01) CHECK(std::abs(v - (1.0 - std::exp(-x) * (1.0 + x))) < 1e-6);
    ++rows;
  }
  CHECK(rows > 4096);
  CHECK(v > 1.0 - 1e-8);

  r = run({"convolve", "--dist", "gengamma:1:1:1", "--weights", "2", "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["result"]["mean"].get<double>() - 2.0) < 1e-5);
  CHECK(j["config"]["weights"] == json::array({2.0}));

  CHECK(run({"convolve", "--dist", "gengamma:1:1:1", "--weights", "1,1"}).code == 1);
}

TEST_CASE("cli: output path and output directory") {
  const fs::path dir = temp_dir("out");
  const fs::path file = dir / "classify.txt";
  auto r = run({"classify", "--p", "2", "--q", "2", "-o", file.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(file) == "A3\n");

  ::setenv("STORD_OUTPUT_DIR", dir.string().c_str(), 1);
  r = run({"lr", "--d1", "gengamma:1:2:1", "--d2", "gengamma:1:2:2"});
  ::unsetenv("STORD_OUTPUT_DIR");
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(json::parse(slurp(dir / "lr.json"))["command"] == "lr");

  CHECK(run({"classify", "--p", "2", "--q", "2", "-o", (dir / "missing" / "x.txt").string()}).code == 1);
}

TEST_CASE("cli: suite output is byte-identical for identical configurations") {
  const std::vector<std::string> args{"suite",  "--seed",      "9",    "--per-preset", "1",
                                      "--presets", "exp-exp,power-a3,noniid-a2", "--n-samples", "2000"};
  const auto r1 = run(args), r2 = run(args);
  REQUIRE(r1.code == 0);
  CHECK(r1.out == r2.out);
  const json j = json::parse(r1.out);
  CHECK(j["config"]["seed"] == 9);
  CHECK(j["result"]["summary"]["total"] == 3);
  CHECK(j["result"]["summary"]["inconsistent"] == 0);

  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  CHECK(run(threaded).out == r1.out);

  const auto files = run({"suite", "--scenario", scenario("exp-exp"), "--scenario", scenario("power-a2")});
  CHECK(files.code == 0);
  CHECK(json::parse(files.out)["result"]["summary"]["evaluated"] == 2);
}
