#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fishpath/feynman.hpp"
#include "fishpath/grid.hpp"
#include "fishpath/model.hpp"
#include "fishpath/sde.hpp"
#include "fishpath/strategy.hpp"

namespace fishpath::config {

inline constexpr int kSchemaVersion = 1;

enum class Subcommand { simulate, solve_hjb, estimate_theta, strategy, field, verify };

std::string to_string(Subcommand sub);
Subcommand subcommand_from_string(const std::string& name);

struct PolicyConfig {
  std::string kind = "zero";  // zero | constant | closed-form
  double value = 0.0;
};

struct HjbConfig {
  std::string potential = "quadratic";  // quadratic: W = w (x^2 + v^2) / 2; constant: W = w
  double potential_weight = 0.5;
  std::string drift = "ou";  // ou: mu = -kappa (x, v); zero
  double drift_rate = 0.5;
  double sigma1 = 0.5;
  double sigma2 = 0.5;
  std::optional<double> omega;
  double s_start = 0.0;
  double s_end = 1.0;
  std::size_t n_time_steps = 0;  // 0 picks the smallest stable count
  double stability_factor = 0.25;
};

struct FeynmanKacConfig {
  std::vector<std::array<double, 2>> probes{{0.0, 0.0}};
  std::size_t n_paths = 10000;
  std::size_t n_steps = 40;
  bool extrapolate = true;
};

struct FieldConfig {
  double gamma = 0.0;  // 0 selects sqrt(8/3)
  std::size_t truncation = 64;
  double parameter = 0.0;  // l at which k is frozen for strategies
  std::size_t n_samples = 256;  // evaluation points written by the field subcommand
};

struct StrategyConfig {
  double time = 0.0;
  double epsilon = 1e-12;
  std::vector<std::size_t> reference;
};

struct Modes {
  feynman::GaussianMode gaussian = feynman::GaussianMode::exact;
  CrossTerm cross_term = CrossTerm::paper;
  sde::VelocityConvention velocity_convention = sde::VelocityConvention::paper;
  strategy::StrategyMode strategy_mode = strategy::StrategyMode::foc_consistent;
  strategy::FAssembly f_assembly = strategy::FAssembly::control_in_drift;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::optional<Subcommand> subcommand;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  ModelParams model;
  SchoolState initial;
  std::vector<Interval> position_bounds;
  PolicyConfig policy;
  std::size_t n_paths = 16;
  Axis grid_x{-4.0, 4.0, 101};
  Axis grid_v{-4.0, 4.0, 101};
  HjbConfig hjb;
  FeynmanKacConfig feynman_kac;
  FieldConfig field;
  StrategyConfig strategy;
  Modes modes;
  std::string verify_scale = "quick";
};

/// Strict parse: unknown keys and missing required keys raise ValidationError
/// naming the key path. Defaults fill everything optional.
RunConfig parse_config(const std::string& text);

/// Applies one "key=value" override to the modes block.
void apply_mode_override(RunConfig& config, const std::string& assignment);

/// The fully-defaulted configuration as JSON (the manifest echo).
nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace fishpath::config
