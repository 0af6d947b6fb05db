#include "fishpath/objective.hpp"

#include <cmath>
#include <fmt/format.h>

#include "fishpath/errors.hpp"

namespace fishpath {

namespace {

double running_reward(const ModelParams& params, const RewardSpec& reward, const SchoolState& state,
                      std::span<const double> controls) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double w = discounted_running_weight(params, state.time, i);
    total += w * evaluate_reward(reward, state.time, state.positions[i], state.velocities[i],
                                 controls[i]);
  }
  return total;
}

void check_inputs(const ModelParams& params, const sde::DynamicsSpec& dynamics,
                  const SchoolState& initial, std::size_t n_paths) {
  params.validate();
  dynamics.validate(params.n_fish);
  initial.validate(params.n_fish);
  require(n_paths >= 1, "n_paths must be at least 1");
  require(initial.time >= 0.0, "initial time must be nonnegative");
}

}  // namespace

double path_objective(const ModelParams& params, const sde::DynamicsSpec& dynamics,
                      const RewardSpec& reward, const sde::Policy& policy,
                      const SchoolState& initial, std::uint64_t seed, std::uint64_t path_index) {
  const std::size_t n_steps = sde::step_count(params.horizon, params.dt);
  double integral = 0.0;
  auto accumulate = [&](std::size_t step, const SchoolState& s, std::span<const double> u) {
    const double weight = (step == 0 || step == n_steps) ? 0.5 : 1.0;
    integral += weight * running_reward(params, reward, s, u);
  };
  sde::simulate_path(dynamics, params, policy, initial, n_steps, params.dt, seed, path_index,
                     accumulate);
  const double value = integral * params.dt;
  if (!std::isfinite(value)) {
    throw NumericalError(fmt::format("objective of path {} is not finite", path_index));
  }
  return value;
}

Estimate estimate_objective(const ModelParams& params, const sde::DynamicsSpec& dynamics,
                            const RewardSpec& reward, const sde::Policy& policy,
                            const SchoolState& initial, std::size_t n_paths, std::uint64_t seed) {
  check_inputs(params, dynamics, initial, n_paths);
  RunningStats stats;
  for (std::size_t p = 0; p < n_paths; ++p) {
    stats.add(path_objective(params, dynamics, reward, policy, initial, seed, p));
  }
  return stats.estimate();
}

PolicyComparison compare_policies(const ModelParams& params, const sde::DynamicsSpec& dynamics,
                                  const RewardSpec& reward, const sde::Policy& a,
                                  const sde::Policy& b, const SchoolState& initial,
                                  std::size_t n_paths, std::uint64_t seed) {
  check_inputs(params, dynamics, initial, n_paths);
  RunningStats sa, sb;
  for (std::size_t p = 0; p < n_paths; ++p) {
    sa.add(path_objective(params, dynamics, reward, a, initial, seed, p));
    sb.add(path_objective(params, dynamics, reward, b, initial, seed, p));
  }
  PolicyComparison out;
  out.a = sa.estimate();
  out.b = sb.estimate();
  out.gap = out.a.mean - out.b.mean;
  out.combined_std_error = std::hypot(out.a.std_error, out.b.std_error);
  out.significant = std::abs(out.gap) > 3.0 * out.combined_std_error;
  if (!out.significant) {
    out.winner = "indistinguishable";
  } else {
    out.winner = out.gap > 0.0 ? "A" : "B";
  }
  const double best = out.gap >= 0.0 ? out.a.mean : out.b.mean;
  out.below_reward_floor = best < params.reward_floor;
  return out;
}

}  // namespace fishpath
