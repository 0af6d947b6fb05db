#include "fishpath/model.hpp"

#include <cmath>
#include <fmt/format.h>

#include "fishpath/errors.hpp"

namespace fishpath {

void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

void PerFish::set(std::size_t fish, double value, std::size_t n_fish) {
  if (values_.size() == 1 && n_fish > 1) values_.assign(n_fish, values_.front());
  values_.at(fish) = value;
}

namespace {

void check_per_fish(const PerFish& p, std::size_t n_fish, const char* name, auto&& predicate,
                    const char* what) {
  require(p.size() == 1 || p.size() == n_fish,
          fmt::format("{} must have 1 or n_fish={} entries, got {}", name, n_fish, p.size()));
  for (double value : p.values()) {
    require(std::isfinite(value) && predicate(value),
            fmt::format("{} must be {} (got {})", name, what, value));
  }
}

}  // namespace

void ModelParams::validate() const {
  require(n_fish >= 1, "n_fish must be at least 1");
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(std::isfinite(horizon) && horizon > 0.0, "horizon must be positive");
  check_per_fish(discount, n_fish, "discount", [](double r) { return r > 0.0 && r < 1.0; },
                 "in (0,1)");
  check_per_fish(weight, n_fish, "weight", [](double) { return true; }, "finite");
  check_per_fish(survival, n_fish, "survival", [](double h) { return h >= 0.0 && h <= 1.0; },
                 "in [0,1]");
  check_per_fish(sigma1, n_fish, "sigma1", [](double s) { return s >= 0.0; }, "nonnegative");
  check_per_fish(sigma2, n_fish, "sigma2", [](double s) { return s >= 0.0; }, "nonnegative");
  require(std::isfinite(comm_rate) && comm_rate >= 0.0, "comm_rate must be nonnegative");
  require(std::isfinite(coupling) && coupling >= 0.0, "coupling must be nonnegative");
  for (double m : {mult1, mult2, mult3}) {
    require(std::isfinite(m) && m >= 0.0, "multipliers mult1..mult3 must be nonnegative");
  }
  require(std::isfinite(corr) && std::abs(corr) < 1.0, "corr must lie in (-1, 1)");
  require(std::isfinite(quad_cost) && quad_cost > 0.0, "quad_cost must be positive");
  require(std::isfinite(reward_floor) && reward_floor >= 0.0, "reward_floor must be nonnegative");
  require(std::isfinite(omega_epsilon) && omega_epsilon > 0.0, "omega_epsilon must be positive");
}

double cross_covariance(double sigma1, double sigma2, double corr, CrossTerm mode) {
  return mode == CrossTerm::paper ? corr * sigma1 * sigma1 * sigma1 : corr * sigma1 * sigma2;
}

double ModelParams::cross_covariance(std::size_t fish) const {
  return fishpath::cross_covariance(sigma1[fish], sigma2[fish], corr, cross_term);
}

double ModelParams::omega(std::size_t fish) const {
  const double s1 = sigma1[fish];
  const double s2 = sigma2[fish];
  return quad_cost * (s1 * s1 + 2.0 * cross_covariance(fish) + s2 * s2);
}

void SchoolState::validate(std::size_t n_fish) const {
  require(positions.size() == n_fish && velocities.size() == n_fish,
          fmt::format("school state must hold {} positions and velocities (got {} and {})", n_fish,
                      positions.size(), velocities.size()));
  require(std::isfinite(time), "school time must be finite");
  for (std::size_t i = 0; i < n_fish; ++i) {
    require(std::isfinite(positions[i]) && std::isfinite(velocities[i]),
            fmt::format("school state of fish {} is not finite", i));
  }
}

bool SchoolState::within(std::span<const Interval> bounds) const {
  if (bounds.empty()) return true;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Interval& b = bounds.size() == 1 ? bounds.front() : bounds[i];
    if (positions[i] < b.lo || positions[i] > b.hi) return false;
  }
  return true;
}

RewardSpec RewardSpec::constant(double c) {
  return generic([c](double, double, double, double) { return c; });
}

double evaluate_reward(const RewardSpec& spec, double s, double x, double v, double u) {
  if (!(std::isfinite(s) && std::isfinite(x) && std::isfinite(v) && std::isfinite(u))) {
    throw ValidationError("reward evaluated at a non-finite input");
  }
  if (spec.kind == RewardKind::example1) return x * v * u * u;
  require(static_cast<bool>(spec.fn), "generic reward has no callable");
  return spec.fn(s, x, v, u);
}

double discounted_running_weight(const ModelParams& params, double s, std::size_t fish) {
  require(s >= 0.0, "discounted_running_weight needs s >= 0");
  return std::exp(-params.discount[fish] * s) * params.weight[fish] * params.survival[fish];
}

}  // namespace fishpath

namespace fishpath {

void RunningStats::add(double value) {
  ++n_;
  const double delta = value - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (value - mean_);
}

Estimate RunningStats::estimate() const {
  return {mean_, n_ > 0 ? std::sqrt(sample_variance() / static_cast<double>(n_)) : 0.0, n_};
}

}  // namespace fishpath
