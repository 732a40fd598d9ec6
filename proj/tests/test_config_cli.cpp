#include "skt/cli.hpp"
#include "skt/config.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace skt;
using nlohmann::json;

namespace {

json small_config() {
  return json::parse(R"({
    "model": {"n": 2, "a0": [1, 1], "a": [[1, 0.4], [0.2, 1]]},
    "basis": {"dim": 1, "lengths": "pi", "modes": 8},
    "noise": {"family": "diagonal-multiplicative", "K": 2, "q": {"decay_exponent": 1}, "c": 0.3, "seed": 3},
    "sim": {"dt": 1e-3, "T": 0.05, "paths": 20,
            "initial": [[{"k": [0], "amp": 0.5}, {"k": [1], "amp": 0.3}],
                        [{"k": [0], "amp": 0.6}, {"k": [2], "amp": -0.2}]]}
  })");
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("skt_test_" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path write(const std::string& file, const json& j) const {
    std::ofstream(path / file) << j.dump(2);
    return path / file;
  }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("overrides") {
  json doc = small_config();
  apply_override(doc, "sim.dt=2e-4");
  apply_override(doc, "noise.family=additive-smooth");
  apply_override(doc, "sim.new.deep=[1,2]");
  CHECK(doc["sim"]["dt"] == 2e-4);
  CHECK(doc["noise"]["family"] == "additive-smooth");
  CHECK(doc["sim"]["new"]["deep"] == json::array({1, 2}));
  CHECK_THROWS_AS(apply_override(doc, "no-equals"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "a..b=1"), ConfigError);
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(small_config());
  CHECK(c.model.n == 2);
  CHECK(c.model.pi[1] == doctest::Approx(2.0));  // solved from detailed balance
  CHECK(c.basis.lengths[0] == doctest::Approx(std::numbers::pi));
  CHECK(c.basis.grid == 16);
  CHECK(c.noise.q[1] == doctest::Approx(0.5));
  CHECK(c.sim.scheme == Scheme::semi_implicit);
  CHECK(c.sim.moment_order == 4.0);
  CHECK(c.sim.initial(0, 0) == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)));
  CHECK(c.sim.initial(0, 1) == doctest::Approx(0.3 * std::sqrt(std::numbers::pi / 2)));
  CHECK(c.sim.initial(1, 2) == doctest::Approx(-0.2 * std::sqrt(std::numbers::pi / 2)));
  CHECK(c.sim.initial(1, 1) == 0.0);

  json bad = small_config();
  bad["model"].erase("a");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = small_config();
  bad["model"]["n"] = 3;
  CHECK_THROWS_AS(parse_config(bad), ShapeError);
  bad = small_config();
  bad["sim"]["drift"] = "quadratic";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = small_config();
  bad["sim"]["initial"].erase(1);
  CHECK_THROWS_AS(parse_config(bad), ShapeError);

  json raw = small_config();
  raw["sim"]["initial"] = {{"coeffs", {{1, 0, 0, 0, 0, 0, 0, 0}, {2, 0, 0, 0, 0, 0, 0, 0}}}};
  CHECK(parse_config(raw).sim.initial(1, 0) == 2.0);
}

TEST_CASE("initial terms are projected onto the basis") {
  const SpectralBasis b(2, {1.0, 2.0}, 4, 8);
  const json terms = json::parse(R"([{"k": [1, 2], "amp": 2.0}, {"k": [9, 0], "amp": 5.0}])");
  const Matrix c = initial_from_terms(b, terms);
  // The k = 9 term lies outside the basis and is dropped.
  const Matrix u = b.synthesize(c);
  const Matrix pts = b.points();
  for (Index g = 0; g < b.num_points(); ++g) {
    const double x = pts(g, 0), y = pts(g, 1);
    CHECK(u(0, g) == doctest::Approx(2.0 * std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y)));
  }
}

TEST_CASE("seed override from the environment") {
  TempDir dir("seed");
  const auto file = dir.write("c.json", small_config());
  CHECK(load_config(file).noise.seed == 3);
  CHECK(load_config(file, {"noise.seed=9"}).noise.seed == 9);
  ::setenv("SKT_SPDE_SEED", "77", 1);
  CHECK(load_config(file, {"noise.seed=9"}).noise.seed == 77);
  ::unsetenv("SKT_SPDE_SEED");
}

TEST_CASE("condition report JSON") {
  const ExperimentConfig c = parse_config(small_config());
  const json j = to_json(check_conditions(c.model));
  CHECK(j["route"] == "detailed-balance");
  CHECK(j["admissible"] == true);
  CHECK(j["weights"][1] == doctest::Approx(2.0));
}

TEST_CASE("run exit codes and outputs") {
  TempDir dir("run");
  std::ostringstream log, err;

  RunOptions missing;
  missing.config = dir.path / "nope.json";
  CHECK(run_experiment(missing, log, err) == kExitUsage);

  RunOptions ok;
  ok.config = dir.write("ok.json", small_config());
  ok.output = dir.path / "ok";
  ok.workers = 2;
  REQUIRE(run_experiment(ok, log, err) == kExitOk);
  for (const char* f : {"stats.csv", "summary.json", "conditions.json", "manifest.json"}) {
    CHECK(std::filesystem::exists(dir.path / "ok" / f));
  }
  const json summary = json::parse(slurp(dir.path / "ok" / "summary.json"));
  CHECK(summary["completed"] == 20);
  CHECK(summary["sup_l2_sq"]["mean"].get<double>() > 0.0);
  CHECK(summary["final"]["mass"].size() == 2);
  const std::string csv = slurp(dir.path / "ok" / "stats.csv");
  CHECK(csv.rfind(std::string(kStatsCsvHeader) + "\n", 0) == 0);

  RunOptions unknown = ok;
  unknown.study = "bogus";
  CHECK(run_experiment(unknown, log, err) == kExitUsage);

  json bad = small_config();
  bad["model"]["a"] = {{1, 4}, {4, 1}};
  RunOptions inadmissible;
  inadmissible.config = dir.write("bad.json", bad);
  inadmissible.output = dir.path / "bad";
  std::ostringstream why;
  CHECK(run_experiment(inadmissible, log, why) == kExitInadmissible);
  CHECK(why.str().find("alpha2") != std::string::npos);
  const json cond = json::parse(slurp(dir.path / "bad" / "conditions.json"));
  CHECK(cond["admissible"] == false);
  CHECK_FALSE(std::filesystem::exists(dir.path / "bad" / "stats.csv"));

  json wild = small_config();
  wild["sim"]["scheme"] = "euler-maruyama";
  wild["sim"]["dt"] = 0.05;
  wild["sim"]["T"] = 20.0;
  RunOptions blow;
  blow.config = dir.write("wild.json", wild);
  blow.output = dir.path / "wild";
  CHECK(run_experiment(blow, log, err) == kExitBlowUp);
  CHECK(json::parse(slurp(dir.path / "wild" / "summary.json"))["blown_up_fraction"] == 1.0);
}

TEST_CASE("command line parsing") {
  TempDir dir("cli");
  const auto file = dir.write("ok.json", small_config()).string();
  const std::string out = (dir.path / "o").string();
  std::vector<std::string> args{"skt-spde", "run", file, "--set", "sim.paths=3", "--set",
                                "sim.T=0.01", "--workers", "1", "--output", out};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  CHECK(cli_main(static_cast<int>(argv.size()), argv.data()) == kExitOk);
  CHECK(json::parse(slurp(dir.path / "o" / "summary.json"))["completed"] == 3);
  const json manifest = json::parse(slurp(dir.path / "o" / "manifest.json"));
  CHECK(manifest["overrides"].size() == 2);

  std::vector<std::string> bad{"skt-spde", "run"};
  std::vector<char*> bargv;
  for (auto& a : bad) bargv.push_back(a.data());
  CHECK(cli_main(static_cast<int>(bargv.size()), bargv.data()) == kExitUsage);
}
