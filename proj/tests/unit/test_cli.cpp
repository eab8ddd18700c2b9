#include "doctest.h"

#include <fstream>
#include <sstream>

#include "experiment.hpp"

using namespace alchemy;
using namespace alchemy::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sft_alchemy_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sft_alchemy");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::filesystem::path kConfigs = ALCHEMY_CONFIG_DIR;

}  // namespace

TEST_CASE("key-value parsing") {
  const KeyValues kv = parse_key_values("# header\nspace.k = 2  # inline\n\npast=0\npast = 1\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("space.k") == "2");
  CHECK(kv.at("past") == "1");
  CHECK_THROWS_AS(parse_key_values("no equals sign\n"), ConfigError);
}

TEST_CASE("words, ranges and values") {
  CHECK(parse_word("0110", 2) == Word{0, 1, 1, 0});
  CHECK(parse_word("10,3,0", 12) == Word{10, 3, 0});
  CHECK_THROWS_AS(parse_word("012", 2), ConfigError);
  CHECK_THROWS_AS(parse_word("0a", 2), ConfigError);

  CHECK(parse_n_range("2..5") == std::vector<int>{2, 3, 4, 5});
  CHECK(parse_n_range("20..60/20") == std::vector<int>{20, 40, 60});
  CHECK(parse_n_range("1, 4, 9") == std::vector<int>{1, 4, 9});
  CHECK_THROWS_AS(parse_n_range("5, 3"), ConfigError);
  CHECK_THROWS_AS(parse_n_range("0..3"), ConfigError);
  CHECK_THROWS_AS(parse_n_range("4..3"), ConfigError);

  const PotentialEntry e = parse_entry("log(3/10)");
  CHECK(e.exp_value == Rational(3, 10));
  CHECK(e.value == doctest::Approx(std::log(0.3)));
  CHECK(parse_entry("-log(2)").exp_value == Rational(1, 2));
  CHECK_FALSE(parse_entry("0.25").exp_value);
  CHECK(parse_entry("0").exp_value == Rational(1));
  CHECK_THROWS_AS(parse_entry("log(-1)"), ConfigError);
}

TEST_CASE("shift and potential descriptions") {
  const ShiftSpace gm = parse_shift_text("k 2\nmetric_base 0.25\nmatrix\n1 1\n1 0\n");
  CHECK(gm == build_shift(2, golden_mean_shift().transitions(), 0.25));
  CHECK_THROWS_AS(parse_shift_text("k 2\nmatrix\n1 1\n"), ConfigError);

  std::mt19937_64 rng(0);
  const auto table = parse_potential_spec(gm, "table window=0,2 00:log(1/2) 01:0 10:log(3)", ".", rng);
  CHECK(table.has_exact_weights());
  CHECK(table.weight<Rational>(Word{1, 0}) == 3);
  CHECK_THROWS_AS(parse_potential_spec(gm, "table window=0,2 00:1 01:1", ".", rng), ConfigError);
  CHECK_THROWS_AS(parse_potential_spec(gm, "bernoulli q=1", ".", rng), ConfigError);
  CHECK_THROWS_AS(parse_potential_spec(gm, "spline", ".", rng), ConfigError);

  const auto dir = scratch("potential");
  write(dir / "g.pot", "# pair potential\nwindow 1 1\n00 0.5\n01 -1\n10 log(2)\n");
  const auto file = parse_potential_spec(gm, "file=g.pot", dir, rng);
  CHECK(file.window() == Window{1, 1});
  CHECK(file.value(Word{1, 0}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(build_config({{"space.k", "2"}, {"spacek", "2"}}, "."), ConfigError);
  CHECK_THROWS_AS(build_config({{"potential", "zero"}}, "."), ConfigError);
  try {
    build_config({{"space.k", "2"}, {"space.matrix", "1 1; 1 0"}, {"cylinders", "0:11"}}, ".");
    FAIL("expected a validation error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("1->1") != std::string::npos);
  }
  CHECK_THROWS_AS(build_config({{"space.k", "2"}, {"past", "0"}, {"arith", "fuzzy"}}, "."), ConfigError);

  const ExperimentConfig a = build_config({{"space.k", "2"}}, ".");
  const ExperimentConfig b = build_config({{"space.k", "2"}}, ".", Overrides{7, std::nullopt});
  CHECK(a.hash() == build_config({{"space.k", "2"}}, ".").hash());
  CHECK(a.hash() != b.hash());
  CHECK(b.seed == 7);
}

TEST_CASE("bundled example reproduces the coin values byte for byte") {
  const auto first = scratch("example_a");
  const auto second = scratch("example_b");
  const std::string cfg = (kConfigs / "example_bernoulli.cfg").string();
  REQUIRE(invoke({"run", "--config", cfg, "--out", first.string()}) == kOk);
  REQUIRE(invoke({"run", "--config", cfg, "--out", second.string()}) == kOk);
  for (const char* name : {"transform.csv", "endpoint.csv", "growth.csv", "summary.json"})
    CHECK(slurp(first / name) == slurp(second / name));

  const std::string transform = slurp(first / "transform.csv");
  CHECK(transform.find("10,,-1:00,mu_n,0.111,0.09,") != std::string::npos);
  CHECK(slurp(first / "endpoint.csv").find(",endpoint,0.15,0.09,") != std::string::npos);
  CHECK(slurp(first / "summary.json").find("\"config_hash\"") != std::string::npos);
}

TEST_CASE("bundled golden mean pressure") {
  const auto dir = scratch("golden");
  REQUIRE(invoke({"pressure", "--config", (kConfigs / "golden_pressure.cfg").string(), "--out", dir.string()}) == kOk);
  const std::string summary = slurp(dir / "summary.json");
  const auto at = summary.find("\"pressure\": ", summary.find("\"results\""));
  REQUIRE(at != std::string::npos);
  const double p = std::stod(summary.substr(summary.find(':', at + 12) + 1));
  CHECK(std::abs(p - 0.4812118251) < 1e-10);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  write(dir / "bad.cfg", "space.k = 2\nspace.matrix = 1 1; 1 0\ncylinders = 0:11\npotential = zero\n");
  CHECK(invoke({"pressure", "--config", (dir / "bad.cfg").string(), "--out", dir.string()}) == kConfigError);

  write(dir / "periodic.cfg", "space.k = 2\nspace.matrix = 0 1; 1 0\npotential = zero\n");
  CHECK(invoke({"pressure", "--config", (dir / "periodic.cfg").string(), "--out", dir.string()}) == kNotPrimitive);

  write(dir / "slow.cfg", "space.k = 2\npotential = random\ntolerance.perron = 1e-30\n");
  CHECK(invoke({"pressure", "--config", (dir / "slow.cfg").string(), "--out", dir.string()}) == kNonConvergence);

  write(dir / "inexact.cfg", "space.k = 2\npotential = constant 0.3\n");
  CHECK(invoke({"pressure", "--config", (dir / "inexact.cfg").string(), "--arith", "exact", "--out", dir.string()}) ==
        kInexact);
  CHECK(invoke({"pressure", "--config", (dir / "inexact.cfg").string(), "--out", dir.string()}) == kOk);

  CHECK(invoke({"pressure"}) == kConfigError);
  CHECK(invoke({"pressure", "--config", (dir / "missing.cfg").string()}) == kConfigError);
  CHECK(invoke({"transform", "--config", (dir / "inexact.cfg").string(), "--out", dir.string()}) == kConfigError);
}

TEST_CASE("audit passes on the bundled battery") {
  const auto dir = scratch("audit");
  CHECK(invoke({"audit", "--config", (kConfigs / "golden_audit.cfg").string(), "--out", dir.string()}) == kOk);
  CHECK(slurp(dir / "audit.csv").find(",fail") == std::string::npos);
}
