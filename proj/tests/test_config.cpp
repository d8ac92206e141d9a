#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "hypflow/config.hpp"

using namespace hypflow;

namespace {

const char* kIni = R"(command = simulate
; leading comment
[example]
name = burgers1d
state = homogeneous
[params]
F2 = 0.5   # trailing comment
[experiment]
eps_ladder = 1e-2, 1e-3, 1e-4
K = 3
alpha = 1
m = 1.25
h = 0.5
[tolerances]
eq = 1e-9
[output]
dir = out
seed = 42
)";

}  // namespace

TEST_CASE("INI parsing") {
  const RunConfig c = RunConfig::parse(kIni);
  CHECK(c.command == "simulate");
  CHECK(c.example == "burgers1d");
  CHECK(c.state == "homogeneous");
  CHECK(c.params.at("F2") == 0.5);
  REQUIRE(c.eps_ladder.size() == 3);
  CHECK(c.eps_ladder[2] == 1e-4);
  CHECK(c.get("K") == 3.0);
  CHECK_FALSE(c.get("delta").has_value());
  CHECK(c.get_or("delta", 1.5) == 1.5);
  CHECK(c.tol_eq == 1e-9);
  CHECK(c.tol_margin == 1e-6);
  CHECK(c.out_dir == "out");
  CHECK(c.seed == 42);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("single-entry ladder in INI") {
  const RunConfig c = RunConfig::parse("[experiment]\neps_ladder = 0.01\n");
  REQUIRE(c.eps_ladder.size() == 1);
  CHECK(c.eps_ladder[0] == 0.01);
}

TEST_CASE("JSON parsing and canonical round trip") {
  const RunConfig a = RunConfig::parse(kIni);
  const std::string canon = a.canonical();
  const RunConfig b = RunConfig::parse(canon);
  CHECK(b.canonical() == canon);
  CHECK(b.canonical_compact() == a.canonical_compact());
  CHECK(canon.find('\n') != std::string::npos);
  CHECK(a.canonical_compact().find('\n') == std::string::npos);

  const RunConfig j = RunConfig::parse(R"({"example": {"name": "vdw", "params": {}}, "experiment": {"n": 64}})");
  CHECK(j.example == "vdw");
  CHECK(j.get("n") == 64.0);
}

TEST_CASE("malformed input is a configuration error") {
  CHECK_THROWS_AS(RunConfig::parse("[bogus]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[example\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("unknown = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[tolerances]\nfoo = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[output]\nseed = -1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[output]\nseed = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("{\"example\": 3}"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("{not json"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[params]\nF2 = abc\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("validation gates") {
  auto rejects = [](const std::string& text) {
    const RunConfig c = RunConfig::parse(text);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  rejects("[experiment]\nfoo = 1\n");
  rejects("[experiment]\neps_ladder = 0.1, 1.5\n");
  rejects("[experiment]\neps_ladder = 0\n");
  rejects("[experiment]\nalpha = 0.4\n");
  rejects("[experiment]\nalpha = 1.2\n");
  rejects("[experiment]\ndelta = 0.5\n");
  rejects("[experiment]\nn = 100\n");
  rejects("[experiment]\nn = 4\n");
  rejects("[tolerances]\neq = 0\n");
  // (2α−1)K = 1 against 2αm = 2.5
  rejects("[experiment]\nK = 1\nalpha = 1\nm = 1.25\nh = 0.5\n");
  rejects("[experiment]\nK = 3\nT_star = 2\ngamma_minus = 1\n");
  CHECK_NOTHROW(RunConfig::parse("[experiment]\nK = 3\nT_star = 9\ngamma_minus = 0.5\nn = 256\n").validate());
  for (const std::string& k : experiment_keys()) CHECK_FALSE(k.empty());
}

TEST_CASE("load from file") {
  const std::string path = "test_config_tmp.ini";
  {
    std::ofstream o(path);
    o << kIni;
  }
  const RunConfig c = RunConfig::load(path);
  CHECK(c.example == "burgers1d");
  std::remove(path.c_str());
}
