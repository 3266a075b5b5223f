#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pil/cli.hpp"

using namespace pil;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return Run{code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("pil_test_" + name);
  std::ofstream(path) << text;
  return path;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"nosuch"}).code == 2);
  CHECK(run({"verify", "nosuch"}).code == 2);
  CHECK(run({"gen", "--p", "4"}).code == 2);
  CHECK(run({"gen", "--p", "3", "--n", "0"}).code == 2);
  CHECK(run({"gen", "--kind", "spiral"}).code == 2);
  const Run r = run({"gen", "--kind", "random"});
  CHECK(r.code == 2);
  CHECK(r.err.find("'seed'") != std::string::npos);
}

TEST_CASE("spec errors name the field") {
  const auto bad = temp_file("bad.json", R"({"command": "gen", "params": {"t": "x/2"}})");
  const Run r = run({"gen", "--config", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("'t'") != std::string::npos);
  const auto unknown = temp_file("unknown.json", R"({"colour": 1})");
  CHECK(run({"gen", "--config", unknown.string()}).err.find("'colour'") != std::string::npos);
  CHECK_THROWS_AS(parse_experiment_spec(R"({"p": "three"})"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec("[1, 2]"), SpecError);
  try {
    parse_experiment_spec(R"({"generator": {"kind": "random", "cubes": -1}})");
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    CHECK(e.field() == "generator.cubes");
  }
}

TEST_CASE("spec parsing and flag overrides") {
  const ExperimentSpec s = parse_experiment_spec(
      R"({"command": "sweep", "p": 2, "n": 4, "seed": 9, "generator": {"kind": "random", "cubes": 5, "M": 2},
          "params": {"n_grid": [2, 3], "t_grid": ["1/2"], "delta": 1}, "slack": "10"})");
  CHECK(s.p == 2);
  CHECK(s.n == 4);
  CHECK(s.seed == 9u);
  CHECK(s.generator.kind == "random");
  CHECK(s.generator.M == 2);
  CHECK(s.n_grid == std::vector<unsigned>{2, 3});
  CHECK(s.delta == 1u);
  const auto cfg = temp_file("gen.json", R"({"p": 2, "n": 3, "generator": {"kind": "full"}})");
  const Run a = run({"gen", "--config", cfg.string()});
  REQUIRE(a.code == 0);
  CHECK(a.out.rfind("2 3", 0) == 0);
  const Run b = run({"gen", "--config", cfg.string(), "--n", "2"});
  REQUIRE(b.code == 0);
  CHECK(b.out.rfind("2 2", 0) == 0);
}

TEST_CASE("generated output is deterministic") {
  const std::vector<std::string> args{"gen", "--kind", "random", "--seed", "5", "--p", "3", "--n", "3", "--cubes", "20", "--M", "3"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto other = args;
  other[4] = "6";
  CHECK(run(other).out != a.out);
}

TEST_CASE("gen output round trips through check") {
  const Run g = run({"gen", "--p", "3", "--n", "2"});
  REQUIRE(g.code == 0);
  const auto path = temp_file("cfg.txt", g.out);
  const Run c = run({"check", "--in", path.string(), "--s", "1/2"});
  CHECK(c.code == 0);
  CHECK(c.out.find("cubes=16") != std::string::npos);
}

TEST_CASE("sweep") {
  const Run empty = run({"sweep"});
  CHECK(empty.code == 0);
  CHECK(empty.out == sweep_csv_header() + "\n");
  const std::vector<std::string> args{"sweep", "--kind", "random", "--seed", "3", "--p", "2", "--cubes", "6", "--M", "2",
                                      "--n-grid", "2", "3", "--t-grid", "1/2", "1"};
  const Run a = run(args);
  const Run b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(lines(a.out) == 5);
  CHECK(run({"sweep", "--kind", "random", "--n-grid", "2"}).code == 2);
}

TEST_CASE("richtubes on the full grid") {
  const Run r = run({"richtubes", "--kind", "full", "--p", "2", "--n", "3", "--delta", "1", "--a", "2", "--b", "4"});
  CHECK(r.code == 0);
  // One header line plus the 64 tubes.
  CHECK(lines(r.out) == 65);
}

TEST_CASE("other commands run") {
  CHECK(run({"incidence", "--p", "2", "--n", "3"}).code == 0);
  CHECK(run({"dft", "--p", "3", "--n", "3"}).code == 0);
  CHECK(run({"uniformize", "--p", "3", "--n", "3"}).code == 0);
  const Run bs = run({"buildscale", "--p", "3", "--n", "4", "--delta", "2"});
  CHECK(bs.code == 0);
  CHECK(bs.out.find("fine_level") != std::string::npos);
  CHECK(run({"verify", "fourier", "--p", "2", "--n", "2", "--trials", "2"}).code == 0);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("check skips the family certificate when a cube has no family") {
  const auto path = temp_file("partial.txt", "3 2\n3^2:(0,0)\n3^2:(1,4)\n3^2:[1,0]\n3^2:(0,0) -> 3^2:[1,0]\n");
  const Run r = run({"check", "--in", path.string(), "--s", "1/2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("nice=skipped cubes_without_family=1") != std::string::npos);
}
