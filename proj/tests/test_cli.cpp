#include <doctest.h>

#include <filesystem>

#include "fishpath/config.hpp"
#include "fishpath/errors.hpp"
#include "fishpath/io.hpp"
#include "fishpath/runner.hpp"

using namespace fishpath;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({"seed": 42, "model": {"n_fish": 2, "horizon": 1, "dt": 0.01}})";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fishpath_test_" + name);
  fs::remove_all(dir);
  return dir;
}

config::RunConfig configured(const std::string& sub, const fs::path& out, const char* text = kMinimal) {
  auto c = config::parse_config(text);
  c.subcommand = config::subcommand_from_string(sub);
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const auto c = config::parse_config(kMinimal);
  CHECK(c.seed == 42);
  CHECK(c.model.n_fish == 2);
  CHECK(c.model.dt == 0.01);
  CHECK(c.n_paths == 16);
  CHECK(c.grid_x.n == 101);
  CHECK(c.initial.positions == std::vector<double>{1.0, 2.0});
  CHECK(c.initial.velocities == std::vector<double>{1.0, 1.25});
  CHECK(c.modes.gaussian == feynman::GaussianMode::exact);
  CHECK(c.modes.strategy_mode == strategy::StrategyMode::foc_consistent);
  const auto echo = config::to_json(c);
  CHECK(echo["schema_version"] == 1);
  CHECK(echo["model"]["quad_cost"] == 1.0);
  CHECK(config::parse_config(echo.dump()).model.n_fish == 2);
}

TEST_CASE("config errors name the offending key") {
  CHECK_THROWS_WITH_AS(config::parse_config(R"({"seed": 1, "model": {"n_fish": 2, "horizon": 1, "dt": 0}})"),
                       doctest::Contains("dt must be positive"), ValidationError);
  CHECK_THROWS_WITH_AS(config::parse_config(R"({"seed": 1, "foo": 3, "model": {"n_fish": 2, "horizon": 1, "dt": 0.1}})"),
                       doctest::Contains("foo"), ValidationError);
  CHECK_THROWS_WITH_AS(config::parse_config(R"({"seed": 1, "model": {"n_fish": 2, "horizon": 1, "dt": 0.1, "bar": 0}})"),
                       doctest::Contains("model.bar"), ValidationError);
  CHECK_THROWS_WITH_AS(config::parse_config(R"({"seed": 1, "model": {"n_fish": 2, "dt": 0.1}})"),
                       doctest::Contains("model.horizon"), ValidationError);
  CHECK_THROWS_AS(config::parse_config(R"({"schema_version": 2, "seed": 1, "model": {"n_fish": 2, "horizon": 1, "dt": 0.1}})"),
                  ValidationError);
  CHECK_THROWS_AS(config::parse_config("{not json"), ValidationError);
}

TEST_CASE("mode overrides") {
  auto c = config::parse_config(kMinimal);
  config::apply_mode_override(c, "gaussian=paper");
  config::apply_mode_override(c, "cross_term=conventional");
  CHECK(c.modes.gaussian == feynman::GaussianMode::paper);
  CHECK(c.model.cross_term == CrossTerm::conventional);
  CHECK_THROWS_AS(config::apply_mode_override(c, "gaussian"), ValidationError);
  CHECK_THROWS_AS(config::apply_mode_override(c, "colour=blue"), ValidationError);
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("simulate is byte-identical across runs") {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  auto ca = configured("simulate", a), cb = configured("simulate", b);
  CHECK(runner::run(ca, runner::LogLevel::quiet).exit_code == 0);
  CHECK(runner::run(cb, runner::LogLevel::quiet).exit_code == 0);
  for (const char* name : {"trajectories.csv", "objective.json"}) {
    CHECK(io::read_file(a / name) == io::read_file(b / name));
  }
  const auto csv = io::read_file(a / "trajectories.csv");
  CHECK(csv.rfind("path,step,time,fish,x,v,u\n", 0) == 0);
  const auto manifest = io::Json::parse(io::read_file(a / "manifest.json"));
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["config"]["model"]["n_fish"] == 2);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("solve-hjb grids round-trip") {
  const auto dir = scratch("hjb");
  auto c = configured("solve-hjb", dir);
  c.grid_x = {-2.0, 2.0, 21};
  c.grid_v = {-2.0, 2.0, 21};
  REQUIRE(runner::run(c, runner::LogLevel::quiet).exit_code == 0);
  const auto csv = io::read_file(dir / "theta.csv");
  CHECK(csv.rfind("x,v,value\n", 0) == 0);
  const auto grid = io::read_grid(csv, io::Json::parse(io::read_file(dir / "theta.json")));
  CHECK(io::grid_csv(grid) == csv);
  CHECK(fs::exists(dir / "control.csv"));
  fs::remove_all(dir);
}

TEST_CASE("singular strategy exits 2 and leaves nothing behind") {
  const auto dir = scratch("singular");
  auto c = configured("strategy", dir,
                      R"({"seed": 1, "model": {"n_fish": 2, "horizon": 1, "dt": 0.01},
                          "initial": {"positions": [0.0, 1.0], "velocities": [1.0, 2.0]}})");
  const auto r = runner::run(c, runner::LogLevel::quiet);
  CHECK(r.exit_code == 2);
  CHECK(r.message.find("strategy singular") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "strategy.json"));
  CHECK_FALSE(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}

TEST_CASE("strategy and field outputs") {
  const auto dir = scratch("strategy");
  auto c = configured("strategy", dir);
  REQUIRE(runner::run(c, runner::LogLevel::quiet).exit_code == 0);
  const auto s = io::Json::parse(io::read_file(dir / "strategy.json"));
  CHECK(s["fish"].size() == 2);
  CHECK(s["fish"][0].contains("u_star"));
  CHECK(fs::exists(dir / "cases.json"));
  auto f = configured("field", dir);
  REQUIRE(runner::run(f, runner::LogLevel::quiet).exit_code == 0);
  CHECK(io::read_file(dir / "field_samples.csv").rfind("l,k,metric_weight\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("verify subcommand reports every suite") {
  const auto dir = scratch("verify");
  auto c = configured("verify", dir);
  const auto r = runner::run(c, runner::LogLevel::quiet);
  CHECK(r.exit_code == 0);
  const auto report = io::Json::parse(io::read_file(dir / "verify_report.json"));
  CHECK(report["all_pass"] == true);
  CHECK(report["suites"].size() == 10);
  const auto again = scratch("verify_again");
  auto c2 = configured("verify", again);
  CHECK(runner::run(c2, runner::LogLevel::quiet).exit_code == 0);
  CHECK(io::read_file(dir / "verify_report.json") == io::read_file(again / "verify_report.json"));
  fs::remove_all(dir);
  fs::remove_all(again);
}
