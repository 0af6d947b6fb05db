#pragma once

#include <cstdint>
#include <string>

#include "fishpath/model.hpp"
#include "fishpath/sde.hpp"

namespace fishpath {

/// Monte Carlo estimate of E[ int_0^t sum_i exp(-rho^i s) alpha^i H^i h(s, x^i, v^i, u^i) ds ]
/// with the time integral taken by the trapezoid rule on the simulation grid.
Estimate estimate_objective(const ModelParams& params, const sde::DynamicsSpec& dynamics,
                            const RewardSpec& reward, const sde::Policy& policy,
                            const SchoolState& initial, std::size_t n_paths, std::uint64_t seed);

/// Objective of a single path (the summand of estimate_objective).
double path_objective(const ModelParams& params, const sde::DynamicsSpec& dynamics,
                      const RewardSpec& reward, const sde::Policy& policy,
                      const SchoolState& initial, std::uint64_t seed, std::uint64_t path_index);

struct PolicyComparison {
  Estimate a;
  Estimate b;
  double gap = 0.0;              // mean(a) - mean(b), from paired samples
  double combined_std_error = 0.0;  // sqrt(se_a^2 + se_b^2)
  bool significant = false;      // |gap| > 3 combined_std_error
  std::string winner;            // "A", "B" or "indistinguishable"
  bool below_reward_floor = false;  // winner's estimate < reward_floor
};

PolicyComparison compare_policies(const ModelParams& params, const sde::DynamicsSpec& dynamics,
                                  const RewardSpec& reward, const sde::Policy& a,
                                  const sde::Policy& b, const SchoolState& initial,
                                  std::size_t n_paths, std::uint64_t seed);

}  // namespace fishpath
