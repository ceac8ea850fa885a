#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "combmat/cli.hpp"
#include "combmat/results_io.hpp"

namespace fs = std::filesystem;
using combmat::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("combmat_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"tail", "--bogus"}).code == 1);
  CHECK(invoke({"tail", "--seed", "1", "--eps-grid", "0.1:0.2:2"}).code == 1);  // --n missing
  CHECK(invoke({"tail", "--n", "4", "--seed", "1", "--eps-grid", "0.1:0.2"}).code == 1);
  CHECK(invoke({"levy", "--n", "4", "--seed", "1"}).code == 1);
  CHECK(invoke({"levy", "--n", "4", "--vector", "basis:9", "--eps", "0", "--exact"}).code == 1);
  CHECK(invoke({"verify", "--suite", "nonsense"}).code == 1);
  CHECK(invoke({"singularity", "--n", "8", "--seed", "1", "--exact"}).code == 1);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("verify identities passes") {
  const auto r = invoke({"verify", "--suite", "identities"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("verify all passes") {
  const auto r = invoke({"verify", "--suite", "all"});
  INFO(r.out);
  CHECK(r.code == 0);
}

TEST_CASE("exact levy table") {
  const auto r = invoke({"levy", "--n", "4", "--d", "2", "--vector", "basis:1", "--eps", "0,1", "--exact"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header.rfind("epsilon", 0) == 0);
  CHECK(first.rfind("0 ", 0) == 0);
  CHECK(first.find("0.5") != std::string::npos);
  CHECK(second.find(" 1 ") != std::string::npos);
  CHECK(first.find("exact") != std::string::npos);

  const auto random = invoke({"levy", "--n", "12", "--vector", "random", "--eps", "0,0.1,0.2", "--exact", "--seed", "5"});
  CHECK(random.code == 0);
}

TEST_CASE("missing seed is generated and printed") {
  const auto r = invoke({"singularity", "--n", "2", "--d", "1"});
  CHECK(r.code == 0);
  CHECK(r.err.rfind("seed: ", 0) == 0);
  CHECK(r.out.find("singularity_probability") != std::string::npos);
}

TEST_CASE("tail --out writes the results schema deterministically") {
  const auto path = scratch("tail.csv");
  const std::vector<std::string> args{"tail", "--n", "8", "--d", "4", "--reps", "50", "--eps-grid", "0.05:0.5:4",
                                      "--seed", "42", "--out", path.string()};
  REQUIRE(invoke(args).code == 0);
  const auto first = slurp(path);
  CHECK(first.rfind(std::string(combmat::kResultsHeader) + "\n", 0) == 0);
  const auto rows = combmat::read_results(path.string(), combmat::OutputFormat::csv);
  REQUIRE(rows.size() == 4);
  CHECK(rows[3].x == 0.5);
  CHECK(rows[0].seed == 42);
  REQUIRE(invoke(args).code == 0);
  CHECK(slurp(path) == first);

  const auto jpath = scratch("tail.jsonl");
  auto jargs = args;
  jargs[jargs.size() - 1] = jpath.string();
  jargs.insert(jargs.end(), {"--format", "jsonl"});
  REQUIRE(invoke(jargs).code == 0);
  CHECK(combmat::read_results(jpath.string(), combmat::OutputFormat::jsonl) == rows);
}

TEST_CASE("io failures exit 3") {
  CHECK(invoke({"tail", "--n", "4", "--reps", "5", "--eps-grid", "0.1:0.2:2", "--seed", "1", "--out",
                "/nonexistent-dir/x/out.csv"})
            .code == 3);
  CHECK(invoke({"levy", "--n", "4", "--vector", "file:/nonexistent-dir/v.txt", "--eps", "0", "--exact"}).code == 3);
  CHECK(invoke({"spectrum", "--in", "/nonexistent-dir/m.csv"}).code == 3);
}

TEST_CASE("vector files and matrices") {
  const auto vpath = scratch("v.txt");
  std::ofstream(vpath) << "3, 4\n0 0\n";
  const auto r = invoke({"clcd", "--n", "4", "--vector", "file:" + vpath.string(), "--theta-max", "2", "--grid-step", "1e-3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("outcome") != std::string::npos);
  CHECK(invoke({"clcd", "--n", "4", "--vector", "file:" + vpath.string(), "--no-normalize", "--pair", "1"}).code == 0);

  const auto mpath = scratch("m.csv");
  REQUIRE(invoke({"sample", "--n", "6", "--seed", "3", "--out", mpath.string()}).code == 0);
  const auto from_file = invoke({"spectrum", "--in", mpath.string(), "--exact"});
  const auto sampled = invoke({"spectrum", "--n", "6", "--seed", "3", "--exact"});
  CHECK(from_file.code == 0);
  CHECK(from_file.out == sampled.out);
  CHECK(from_file.out.find("exact_rank") != std::string::npos);
}

TEST_CASE("other experiments run") {
  CHECK(invoke({"distance", "--n", "8", "--reps", "30", "--eps-grid", "0.1:0.5:3", "--seed", "2"}).code == 0);
  CHECK(invoke({"opnorm", "--n", "8", "--reps", "30", "--t-grid", "1:2:3", "--seed", "2"}).code == 0);
  CHECK(invoke({"smallball", "--n", "8", "--reps", "30", "--mode", "left", "--seed", "2"}).code == 0);
  const auto cov = invoke({"covariance", "--n", "4", "--reps", "2000", "--seed", "2"});
  CHECK(cov.code == 0);
  CHECK(cov.out.find("max_deviation") != std::string::npos);
  const auto jsonl = invoke({"singularity", "--n", "2", "--d", "1", "--seed", "1", "--format", "jsonl"});
  CHECK(jsonl.out.rfind("{\"experiment\":\"singularity_probability\"", 0) == 0);

  const auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"params": {"n": 2, "d": 1}, "reps": 100, "seed": 77})";
  const auto fromcfg = invoke({"singularity", "--config", cfg.string()});
  CHECK(fromcfg.code == 0);
  CHECK(fromcfg.err.find("seed:") == std::string::npos);
  CHECK(fromcfg.out.find("77") != std::string::npos);
}
