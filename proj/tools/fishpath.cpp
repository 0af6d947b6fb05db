#include <CLI11.hpp>
#include <fmt/format.h>

#include "fishpath/config.hpp"
#include "fishpath/errors.hpp"
#include "fishpath/io.hpp"
#include "fishpath/runner.hpp"

using namespace fishpath;

int main(int argc, char** argv) {
  CLI::App app{"Seeded school-of-fish path-integral solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> modes;
  std::optional<std::string> scale;

  std::vector<CLI::App*> subs;
  for (const char* name : {"simulate", "solve-hjb", "estimate-theta", "strategy", "field", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--mode", modes, "KEY=VALUE mode override (repeatable)");
    if (std::string(name) == "verify") sub->add_option("--scale", scale, "quick or full");
    else sub->needs(sub->get_option("--config"));
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string sub_name = app.get_subcommands().front()->get_name();
  const auto level = runner::log_level_from_env();

  try {
    config::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = config::parse_config(io::read_file(config_path));
    } else {
      cfg = config::parse_config(R"({"seed": 0, "model": {"n_fish": 2, "horizon": 1, "dt": 0.01}})");
    }
    cfg.subcommand = config::subcommand_from_string(sub_name);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    if (scale) {
      require(*scale == "quick" || *scale == "full", "--scale must be quick or full");
      cfg.verify_scale = *scale;
    }
    for (const auto& m : modes) config::apply_mode_override(cfg, m);

    const auto result = runner::run(cfg, level);
    if (result.exit_code != runner::ExitCode::ok) {
      fmt::print(stderr, "error: {}\n", result.message);
    } else if (level != runner::LogLevel::quiet) {
      fmt::print(stderr, "wrote {} files to {}\n", result.files.size(), cfg.output_dir);
    }
    return result.exit_code;
  } catch (const ValidationError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return runner::ExitCode::validation_failure;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return runner::ExitCode::numerical_failure;
  }
}
